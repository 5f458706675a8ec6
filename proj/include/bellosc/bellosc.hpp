#pragma once

#include "bellosc/acquisition.hpp"
#include "bellosc/baselines.hpp"
#include "bellosc/bell.hpp"
#include "bellosc/errors.hpp"
#include "bellosc/experiment.hpp"
#include "bellosc/measurement.hpp"
#include "bellosc/oscillator.hpp"
#include "bellosc/random.hpp"
#include "bellosc/sampling.hpp"
#include "bellosc/serialization.hpp"
