#pragma once

#include <stdexcept>
#include <string>

namespace bellosc {

// Thrown when a configuration value breaks a documented invariant. The
// message names the invariant so callers can surface it verbatim.
class InvalidConfig : public std::invalid_argument {
 public:
  explicit InvalidConfig(const std::string& invariant)
      : std::invalid_argument("invalid config: " + invariant), invariant_(invariant) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

// Joint binarization was requested with a detector that has not passed
// calibration and no override was given.
class CalibrationError : public std::runtime_error {
 public:
  explicit CalibrationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bellosc
