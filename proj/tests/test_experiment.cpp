#include "bellosc/experiment.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "bellosc/serialization.hpp"

using namespace bellosc;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg = default_config();
  cfg.windows_per_pair = 100;
  return cfg;
}

}  // namespace

TEST(ExperimentConfig, DefaultIsValid) { EXPECT_NO_THROW(validate(default_config())); }

TEST(ExperimentConfig, RejectsBrokenInvariants) {
  {
    ExperimentConfig cfg = default_config();
    cfg.windows_per_pair = 0;
    EXPECT_THROW(validate(cfg), InvalidConfig);
  }
  {
    ExperimentConfig cfg = default_config();
    cfg.joint_noise = {0.1, 0.1};  // product far below hbar/2
    EXPECT_THROW(validate(cfg), InvalidConfig);
  }
  {
    ExperimentConfig cfg = default_config();
    cfg.thresholds = {1.0, 0.6};  // product above hbar/2
    EXPECT_THROW(validate(cfg), InvalidConfig);
  }
  {
    ExperimentConfig cfg = default_config();
    cfg.det_p.failure_prob = 1.0;  // legal detector, illegal experiment
    EXPECT_THROW(validate(cfg), InvalidConfig);
  }
  {
    ExperimentConfig cfg = default_config();
    cfg.window_size = 1;
    EXPECT_THROW(validate(cfg), InvalidConfig);
  }
  {
    ExperimentConfig cfg = default_config();
    cfg.mode = RunMode::kSingle;
    cfg.beam_width = 0.0;
    EXPECT_THROW(validate(cfg), InvalidConfig);
  }
  {
    ExperimentConfig cfg = default_config();
    cfg.physical.mass = -1.0;
    EXPECT_THROW(validate(cfg), InvalidConfig);
  }
  {
    ExperimentConfig cfg = default_config();
    cfg.calibration.windows = 10;
    EXPECT_THROW(validate(cfg), InvalidConfig);
  }
}

TEST(ExperimentConfig, ErrorNamesTheViolatedInvariant) {
  ExperimentConfig cfg = default_config();
  cfg.thresholds.epsilon_x = -1.0;
  try {
    validate(cfg);
    FAIL() << "expected InvalidConfig";
  } catch (const InvalidConfig& e) {
    EXPECT_NE(std::string(e.what()).find("epsilon_x"), std::string::npos);
    EXPECT_EQ(e.invariant(), "thresholds.epsilon_x > 0");
  }
}

TEST(RunCalibration, AllDefaultDetectorsPass) {
  const auto reports = run_calibration(small_config());
  for (const CalibrationReport& r : reports) {
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.trials, 1000);
    EXPECT_LT(r.p_minus, 0.01);
  }
  EXPECT_EQ(reports[0].detector, Observable::kPosition);
  EXPECT_EQ(reports[0].setting, SettingLabel::kUnprimed);
  EXPECT_EQ(reports[1].setting, SettingLabel::kPrimed);
  EXPECT_EQ(reports[2].detector, Observable::kMomentum);
}

TEST(RunExperiment, DefaultConfigBehaviour) {
  ExperimentConfig cfg = default_config();
  cfg.windows_per_pair = 500;
  const RunReport report = run_experiment(cfg);

  // Joint statistics respect the inequality.
  EXPECT_LE(report.chsh_result.s,
            2.0 + 3.0 * report.chsh_result.std_error + 1e-12);
  EXPECT_FALSE(report.chsh_result.violated);
  EXPECT_EQ(report.chsh_result.mode, SampleMode::kDual);

  // Mixed sharp/fuzzy outcomes dominate.
  std::int64_t mixed = 0;
  std::int64_t total = 0;
  for (const PairResult& p : report.pairs) {
    mixed += p.table.n_pm + p.table.n_mp;
    total += p.table.total();
    // Counts sum to windows minus indeterminates.
    EXPECT_EQ(p.table.total() + p.indeterminate, cfg.windows_per_pair);
    EXPECT_EQ(static_cast<std::int64_t>(p.verdicts.size()), cfg.windows_per_pair);
  }
  EXPECT_GT(mixed, total / 2);

  // The forbidden double-positive never shows up: both spreads cannot
  // beat thresholds whose product sits below hbar/2.
  for (const PairResult& p : report.pairs) EXPECT_EQ(p.table.n_pp, 0);

  EXPECT_GT(report.timing.total_trials, 0);
  EXPECT_GE(report.timing.wall_seconds, 0.0);
}

TEST(RunExperiment, PipelineMatchesJointMeasureOperation) {
  ExperimentConfig cfg = small_config();
  const GaussianState state = make_initial_state(cfg.physical, cfg.initial_state);
  for (std::size_t pair = 0; pair < 4; ++pair) {
    const auto samples = generate_pair_samples(cfg, pair);
    const auto [x_label, p_label] = kSettingPairs[pair];
    const DetectorConfig& xdet = x_detector(cfg, x_label);
    const DetectorConfig& pdet = p_detector(cfg, p_label);
    const std::uint64_t pair_base =
        pair * static_cast<std::uint64_t>(cfg.windows_per_pair) *
        static_cast<std::uint64_t>(cfg.window_size);
    for (std::size_t i = 0; i < 200; ++i) {
      const std::uint64_t trial = pair_base + i;
      RandomStream x_rng(cfg.seed, StreamDomain::kRun, trial, StreamRole::kXDetector);
      RandomStream p_rng(cfg.seed, StreamDomain::kRun, trial, StreamRole::kPDetector);
      const JointSample expected = joint_measure(state, cfg.physical, xdet, pdet, cfg.joint_noise,
                                                 x_rng, p_rng, static_cast<std::int64_t>(trial));
      ASSERT_DOUBLE_EQ(samples[i].x_raw, expected.x_raw);
      ASSERT_DOUBLE_EQ(samples[i].p_raw, expected.p_raw);
      ASSERT_EQ(samples[i].x_failed, expected.x_failed);
      ASSERT_EQ(samples[i].p_failed, expected.p_failed);
    }
  }
}

TEST(RunExperiment, ByteIdenticalAcrossRunsAndWorkerCounts) {
  ExperimentConfig cfg = small_config();
  const std::string once = report_to_json(run_experiment(cfg)).dump(2);
  const std::string twice = report_to_json(run_experiment(cfg)).dump(2);
  EXPECT_EQ(once, twice);

  const RunReport parallel = run_experiment(cfg, 4);
  EXPECT_EQ(once, report_to_json(parallel).dump(2));
  EXPECT_THROW(run_experiment(cfg, 0), InvalidConfig);
}

TEST(RunExperiment, CalibrationRefusalCarriesReports) {
  ExperimentConfig cfg = small_config();
  cfg.calibration.source_std_scale = 2.0;  // source spread above threshold: hopeless
  try {
    run_experiment(cfg);
    FAIL() << "expected CalibrationRefusal";
  } catch (const CalibrationRefusal& refusal) {
    bool any_fail = false;
    for (const CalibrationReport& r : refusal.reports()) any_fail = any_fail || !r.pass;
    EXPECT_TRUE(any_fail);
  }

  cfg.override_calibration = true;
  EXPECT_NO_THROW(run_experiment(cfg));
}

TEST(RunExperiment, SingleSampleModeRunsAndRespectsTheBound) {
  ExperimentConfig cfg = small_config();
  cfg.mode = RunMode::kSingle;
  cfg.beam_width = 0.05;
  cfg.windows_per_pair = 300;
  const RunReport report = run_experiment(cfg);
  EXPECT_EQ(report.chsh_result.mode, SampleMode::kSingle);
  EXPECT_LE(report.chsh_result.s, 2.0 + 3.0 * report.chsh_result.std_error + 1e-12);
}

TEST(RunExperiment, SingleModeJointDistributionSatisfiesEq4Exactly) {
  // In photogate mode all four settings can be evaluated on the same
  // drawn trajectories, so a genuine joint distribution over
  // (X, X', P, P') window outcomes exists; its CHSH combination can never
  // exceed 2, with no statistical slack.
  const ExperimentConfig cfg = small_config();
  const GaussianState state = make_initial_state(cfg.physical, cfg.initial_state);
  const int w = 25;
  const int windows = 400;

  OutcomeDistribution4 dist;
  std::int64_t determinate = 0;
  std::vector<Reading> col_x(w);
  std::vector<Reading> col_xp(w);
  std::vector<Reading> col_p(w);
  std::vector<Reading> col_pp(w);
  for (int win = 0; win < windows; ++win) {
    for (int i = 0; i < w; ++i) {
      RandomStream rng(cfg.seed, StreamDomain::kRun,
                       static_cast<std::uint64_t>(win) * w + static_cast<std::uint64_t>(i),
                       StreamRole::kTrajectory);
      const PhasePoint z = sample_phase_point(state, rng);
      const PhasePoint zx = evolve(z, cfg.det_x.phase / cfg.physical.omega, cfg.physical);
      const PhasePoint zxp = evolve(z, cfg.det_x_prime.phase / cfg.physical.omega, cfg.physical);
      const PhasePoint zp = evolve(z, cfg.det_p.phase / cfg.physical.omega, cfg.physical);
      const PhasePoint zpp = evolve(z, cfg.det_p_prime.phase / cfg.physical.omega, cfg.physical);
      col_x[i] = {zx.x, false};
      col_xp[i] = {zxp.x, false};
      Reading tp = photogate_transit(zp, cfg.beam_width, cfg.physical);
      Reading tpp = photogate_transit(zpp, cfg.beam_width, cfg.physical);
      col_p[i] = {velocity_to_momentum(tp.value, cfg.physical), tp.failed};
      col_pp[i] = {velocity_to_momentum(tpp.value, cfg.physical), tpp.failed};
    }
    const SpreadEstimate ex = estimate_spread(col_x);
    const SpreadEstimate exp_ = estimate_spread(col_xp);
    const SpreadEstimate ep = estimate_spread(col_p);
    const SpreadEstimate epp = estimate_spread(col_pp);
    if (!ex.determinate || !exp_.determinate || !ep.determinate || !epp.determinate) continue;
    ++determinate;
    dist.prob(binarize(ex.delta, cfg.thresholds.epsilon_x),
              binarize(exp_.delta, cfg.thresholds.epsilon_x),
              binarize(ep.delta, cfg.thresholds.epsilon_p),
              binarize(epp.delta, cfg.thresholds.epsilon_p)) += 1.0;
  }
  ASSERT_GT(determinate, windows / 2);
  for (double& q : dist.q) q /= static_cast<double>(determinate);
  const JointChshBound r = joint_chsh_bound(dist);
  EXPECT_TRUE(r.holds);
  EXPECT_LE(r.s, 2.0 + 1e-12);
}

TEST(RunExperiment, FlipSwitchMirrorsCountsAndPreservesS) {
  ExperimentConfig cfg = small_config();
  const RunReport plain = run_experiment(cfg);
  cfg.flip_outcomes = true;
  const RunReport flipped = run_experiment(cfg);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(plain.pairs[i].table.n_pp, flipped.pairs[i].table.n_mm);
    EXPECT_EQ(plain.pairs[i].table.n_pm, flipped.pairs[i].table.n_mp);
  }
  EXPECT_DOUBLE_EQ(plain.chsh_result.s, flipped.chsh_result.s);
}

TEST(RunExperiment, AcquisitionPathBarelyPerturbsVerdicts) {
  ExperimentConfig analog = small_config();
  analog.windows_per_pair = 400;
  ExperimentConfig digital = analog;
  digital.acquisition.enabled = true;
  digital.acquisition.adc_bits = 16;

  const RunReport a = run_experiment(analog);
  const RunReport d = run_experiment(digital);
  std::int64_t flips = 0;
  std::int64_t windows = 0;
  for (std::size_t pair = 0; pair < 4; ++pair) {
    ASSERT_EQ(a.pairs[pair].verdicts.size(), d.pairs[pair].verdicts.size());
    for (std::size_t wdx = 0; wdx < a.pairs[pair].verdicts.size(); ++wdx) {
      const PairVerdict& va = a.pairs[pair].verdicts[wdx];
      const PairVerdict& vd = d.pairs[pair].verdicts[wdx];
      ++windows;
      if (va.x_outcome != vd.x_outcome || va.p_outcome != vd.p_outcome) ++flips;
    }
  }
  EXPECT_LT(static_cast<double>(flips) / static_cast<double>(windows), 0.001);
}

TEST(RunExperiment, BootstrapErrorsReportedWhenRequested) {
  ExperimentConfig cfg = small_config();
  cfg.bootstrap_resamples = 200;
  const RunReport report = run_experiment(cfg);
  for (const PairResult& p : report.pairs) {
    if (p.corr.std_error > 0.0) {
      EXPECT_GT(p.bootstrap_std_error, 0.0);
      EXPECT_NEAR(p.bootstrap_std_error, p.corr.std_error, 0.5 * p.corr.std_error);
    }
  }
}

TEST(Serialization, ConfigRoundTripsExactly) {
  ExperimentConfig cfg = default_config();
  cfg.physical.mass = 1.7;
  cfg.initial_state = {InitialStateKind::kCoherent, 0.3, -0.9, 0.0};
  cfg.joint_noise = {0.37, 1.61};
  cfg.det_x_prime.phase = 1.234567890123456;
  cfg.thresholds = {0.55, 0.61};
  cfg.window_size = 37;
  cfg.windows_per_pair = 123;
  cfg.acquisition.enabled = true;
  cfg.acquisition.jitter_std = 0.001;
  cfg.seed = 1234567890123ULL;
  cfg.mode = RunMode::kSingle;
  cfg.beam_width = 0.031;
  cfg.flip_outcomes = true;

  const ExperimentConfig back = config_from_json(config_to_json(cfg));
  EXPECT_TRUE(back == cfg);
  EXPECT_EQ(config_to_json(back).dump(), config_to_json(cfg).dump());
}

TEST(Serialization, PartialConfigFallsBackToDefaults) {
  const nlohmann::json j = {{"seed", 7}, {"windows_per_pair", 55}};
  const ExperimentConfig cfg = config_from_json(j);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.windows_per_pair, 55);
  EXPECT_EQ(cfg.window_size, default_config().window_size);
}

TEST(Serialization, UnknownEnumValuesRejected) {
  EXPECT_THROW(config_from_json({{"mode", "triple"}}), InvalidConfig);
  EXPECT_THROW(config_from_json({{"initial_state", {{"kind", "thermal"}}}}), InvalidConfig);
}

TEST(Serialization, ReportHasConsistentStructure) {
  ExperimentConfig cfg = small_config();
  const RunReport report = run_experiment(cfg);
  const nlohmann::json j = report_to_json(report);
  EXPECT_EQ(j.at("schema_version").get<int>(), kSchemaVersion);
  EXPECT_EQ(j.at("kind").get<std::string>(), "run_report");
  EXPECT_EQ(j.at("pairs").size(), 4u);
  EXPECT_EQ(j.at("calibration").size(), 4u);
  for (const auto& pair : j.at("pairs")) {
    const auto& c = pair.at("counts");
    const std::int64_t sum = c.at("pp").get<std::int64_t>() + c.at("pm").get<std::int64_t>() +
                             c.at("mp").get<std::int64_t>() + c.at("mm").get<std::int64_t>();
    EXPECT_EQ(sum + pair.at("indeterminate").get<std::int64_t>(), cfg.windows_per_pair);
  }
  EXPECT_FALSE(j.contains("timing"));
  EXPECT_TRUE(report_to_json(report, true).contains("timing"));
}

TEST(Serialization, CsvExportShape) {
  ExperimentConfig cfg = small_config();
  cfg.windows_per_pair = 20;
  const RunReport report = run_experiment(cfg);
  std::ostringstream os;
  write_csv(os, report);
  const std::string text = os.str();
  std::int64_t lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  EXPECT_EQ(lines, 1 + 4 * cfg.windows_per_pair);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "window_index,pair_label,x_outcome,p_outcome,indeterminate_flag");
}

TEST(Validation, AllSuitesPassAtReducedScale) {
  ValidationOptions opt;
  opt.singlet_trials_per_pair = 50000;
  opt.lhv_models = 10;
  opt.lhv_trials_per_pair = 10000;
  opt.lambda_grid = 2000;
  opt.simplex_draws = 2000;

  const ValidationReport singlet = run_validation(ValidationSuite::kSinglet, opt);
  EXPECT_TRUE(singlet.pass) << validation_to_json(singlet).dump(2);
  const ValidationReport lhv = run_validation(ValidationSuite::kLhv, opt);
  EXPECT_TRUE(lhv.pass) << validation_to_json(lhv).dump(2);
  const ValidationReport ineq = run_validation(ValidationSuite::kInequalities, opt);
  EXPECT_TRUE(ineq.pass) << validation_to_json(ineq).dump(2);
}
