#pragma once

#include "mex/envs.hpp"
#include "mex/mex.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace mex {

struct RegretCurve {
  VectorXd gaps;
  VectorXd cumulative;
};

/// Recomputes every logged gap from scratch (exact policy evaluation of the
/// stored predicted policies) and accumulates; matches the stored run to
/// 1e-10.
RegretCurve compute_regret(const RunLog& log, const EpisodicMDP& env);
RegretCurve compute_regret(const RunLog& log, const ZeroSumMG& env);

struct PowerLawFit {
  double coefficient = 0.0;
  double exponent = 0.0;
  double r_squared = 1.0;
  int n_dropped = 0;      // nonpositive entries dropped from the fit window
  bool degenerate = false;
};

/// Least squares of log(regret) on log(k) over the second half of the
/// curve. Requires at least 50 points; an all-nonpositive window reports a
/// zero exponent with the degenerate flag set.
PowerLawFit fit_power_law(const VectorXd& cumulative);

/// Schedule eta = sqrt(d_proxy / ((H log(HK/delta) + log_card) * B * K))
/// with absolute constant 1.
double eta_from_theory(double d_proxy, int horizon, int episodes, double loss_scale,
                       double log_card, double delta);

/// Complexity proxy S^2 A H log K standing in for the (uncomputable)
/// eluder coefficient of a tabular model-based class.
double d_proxy_tabular(int n_states, int n_actions, int horizon, int episodes);
/// Proxy d H^2 log(HK) for linear-mixture classes.
double d_proxy_linear_mixture(int d, int horizon, int episodes);

inline double loss_scale_model_based() { return 1.0; }
inline double loss_scale_model_free(int horizon) {
  const double b_l = 2.0 * horizon;
  return b_l * b_l;
}

/// Certainty-equivalent baseline: plans in the likelihood-maximizing member
/// and follows that plan with an epsilon-uniform action mixture. Regret is
/// logged for the executed mixed policy.
RunLog baseline_epsilon_greedy(const EpisodicMDP& env, const HypothesisClass& cls, double epsilon,
                               int episodes, std::uint64_t seed);

// Artifact emission. Doubles are printed with shortest round-trip
// formatting, so rerunning with identical seeds reproduces files byte for
// byte.
std::string format_double(double value);
std::string runlog_csv(const RunLog& log);
std::string regret_csv(const RunLog& log);
std::string episodes_csv(const RunLog& log);

void write_run_artifacts(const RunLog& log, const std::string& env_text,
                         const std::string& class_text, const std::string& dir);

/// Reloads the pieces of an artifact directory that diagnostics need.
RunLog load_runlog(const std::string& dir);

/// 64-bit FNV-1a content hash, hex-encoded; ties reports to their inputs.
std::string content_hash(const std::string& text);

struct GridworldBenchmark {
  RunLog mex_log;
  RunLog baseline_log;
  double mex_mean_return = 0.0;       // unscaled, trailing window
  double baseline_mean_return = 0.0;  // unscaled, trailing window
  int window = 0;
};

/// Head-to-head gridworld run (shared seed): model-based MEX with the
/// theory-default eta against the epsilon-greedy baseline.
GridworldBenchmark run_gridworld_benchmark(std::uint64_t seed, int episodes = 1000,
                                           int window = 100, double epsilon = 0.1);

/// Mean unscaled episodic return over the last `window` episodes.
double trailing_mean_return(const RunLog& log, const EpisodicMDP& env, int window);

struct SuiteResult {
  bool passed = true;
  nlohmann::json report;
};

/// Executes the experiments declared in a sectioned JSON config
/// ([env]/[class]/[algo]/[sweep]/[accept]) into out_dir; unknown keys are
/// rejected with their location. Outputs are byte-stable across reruns.
SuiteResult run_suite(const nlohmann::json& config, const std::string& out_dir);
SuiteResult run_suite_file(const std::string& config_path, const std::string& out_dir);

}  // namespace mex
