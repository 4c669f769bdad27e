// Test-only oracles: exhaustive enumerations, Monte-Carlo estimates, and
// direct sums kept deliberately independent of the library's fast paths.
#pragma once

#include "mex/core.hpp"
#include "mex/hypothesis.hpp"
#include "mex/matrix_game.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace mex::testing {

/// All deterministic policies of an (S, A, H) problem; A^(S*H) of them.
inline std::vector<Policy> enumerate_deterministic_policies(int n_states, int n_actions,
                                                            int horizon) {
  const int slots = n_states * horizon;
  long long count = 1;
  for (int i = 0; i < slots; ++i) {
    count *= n_actions;
  }
  std::vector<Policy> policies;
  policies.reserve(count);
  for (long long code = 0; code < count; ++code) {
    long long rest = code;
    std::vector<std::vector<int>> actions(horizon, std::vector<int>(n_states, 0));
    for (int h = 0; h < horizon; ++h) {
      for (int s = 0; s < n_states; ++s) {
        actions[h][s] = static_cast<int>(rest % n_actions);
        rest /= n_actions;
      }
    }
    policies.push_back(deterministic_policy(actions, n_actions));
  }
  return policies;
}

/// Optimal value at the initial state by exhaustive policy enumeration.
inline double brute_force_optimal_value(const EpisodicMDP& env) {
  double best = -1.0;
  for (const Policy& policy :
       enumerate_deterministic_policies(env.n_states(), env.n_actions(), env.horizon())) {
    const ValueTable table = policy_evaluation(env, policy);
    best = std::max(best, table.V[0](env.initial_state()));
  }
  return best;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

inline MonteCarloEstimate monte_carlo_return(const EpisodicMDP& env, const Policy& policy,
                                             int n_rollouts, std::uint64_t seed) {
  Rng rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n_rollouts; ++i) {
    const double ret = sample_episode(env, policy, rng).total_reward();
    sum += ret;
    sum_sq += ret * ret;
  }
  MonteCarloEstimate est;
  est.mean = sum / n_rollouts;
  const double var = std::max(0.0, sum_sq / n_rollouts - est.mean * est.mean);
  est.std_error = std::sqrt(var / n_rollouts);
  return est;
}

/// Normal-form payoff of a zero-sum game over all deterministic policy
/// pairs, evaluated exactly; entry (i, j) is V_1^{mu_i, nu_j}(x1).
inline Eigen::MatrixXd induced_normal_form(const ZeroSumMG& env) {
  const auto max_policies =
      enumerate_deterministic_policies(env.n_states(), env.n_actions(), env.horizon());
  const auto min_policies =
      enumerate_deterministic_policies(env.n_states(), env.n_min_actions(), env.horizon());
  Eigen::MatrixXd payoff(max_policies.size(), min_policies.size());
  for (size_t i = 0; i < max_policies.size(); ++i) {
    for (size_t j = 0; j < min_policies.size(); ++j) {
      const ValueTable table =
          policy_evaluation(env, JointPolicy{max_policies[i], min_policies[j]});
      payoff(i, j) = table.V[0](env.initial_state());
    }
  }
  return payoff;
}

/// Best response value min over all deterministic min-player policies.
inline double enumerate_best_response_value(const ZeroSumMG& env, const Policy& max_policy) {
  double best = std::numeric_limits<double>::infinity();
  for (const Policy& nu :
       enumerate_deterministic_policies(env.n_states(), env.n_min_actions(), env.horizon())) {
    const ValueTable table = policy_evaluation(env, JointPolicy{max_policy, nu});
    best = std::min(best, table.V[0](env.initial_state()));
  }
  return best;
}

/// Total-variation distance between two kernels (max over rows and slices).
inline double kernel_tv_distance(const ModelBasedHypothesis& model, const Eigen::MatrixXd& truth,
                                 int h) {
  double worst = 0.0;
  const Eigen::MatrixXd& k = model.kernel(h);
  for (Eigen::Index r = 0; r < k.rows(); ++r) {
    worst = std::max(worst, 0.5 * (k.row(r) - truth.row(r)).cwiseAbs().sum());
  }
  return worst;
}

}  // namespace mex::testing
