#pragma once

#include "mex/harness.hpp"

namespace mex {

/// Exact per-timestep state-action visitation of a policy through the true
/// kernel, starting from the fixed initial state.
std::vector<MatrixXd> occupancy_measure(const EpisodicMDP& env, const Policy& policy);

struct GeneralizationReport {
  int n_checks = 0;
  int n_violations = 0;
  double max_margin = 0.0;  // max over (k, f) of LHS - RHS; nonpositive when clean
  double violation_rate = 0.0;
  std::string inputs_hash;

  bool clean() const { return n_violations == 0; }
};

/// Checks, for every episode k and member f, the likelihood-gap inequality
///   sum_h [L_h^{k-1}(f*) - L_h^{k-1}(f)]
///     <= -2 sum_h sum_{s<k} E_{exploration(s)}[hellinger_sq rows of f]
///        + 2 H log(H/delta) + 2 log |class|,
/// with the expectations evaluated exactly via occupancy recursions through
/// the true kernel. Requires a realizable class.
GeneralizationReport check_generalization_modelbased(const RunLog& log, const EpisodicMDP& env,
                                                     const HypothesisClass& cls, double delta);

/// Model-free analogue with squared expected Bellman residual rows,
/// constants 16 H B_l^2 log(HK/delta) + 32 B_l^2 log |class| on the slack
/// and coefficient 1/2 on the discrepancy sum, B_l = 2H.
GeneralizationReport check_generalization_modelfree(const RunLog& log, const EpisodicMDP& env,
                                                    const HypothesisClass& cls, double delta);

struct GecTrace {
  VectorXd ratios;
  bool divergence_flag = false;
};

/// Trace of the ratio of the cumulative value-prediction gap to
/// sqrt(cumulative in-sample discrepancy * k): a proxy curve for the
/// generalized-eluder behavior of the run, not a claim to compute the
/// coefficient itself. Zero denominators are guarded to 0.
GecTrace empirical_gec_ratio(const RunLog& log, const EpisodicMDP& env,
                             const HypothesisClass& cls);

/// Consumes an artifact directory written by the harness and emits the
/// verify report (per-check pass/fail plus worst margins).
nlohmann::json verify_artifact_dir(const std::string& dir, double delta = 0.05);

}  // namespace mex
