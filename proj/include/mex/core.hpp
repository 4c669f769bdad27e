#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mex {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Row index of the (state, action) pair in a flattened (S*A) x S transition matrix.
inline Eigen::Index sa_row(int s, int a, int n_actions) {
  return static_cast<Eigen::Index>(s) * n_actions + a;
}

/// Row index of (state, action, min_action) in a flattened (S*A*B) x S transition matrix.
inline Eigen::Index sab_row(int s, int a, int b, int n_actions, int n_min_actions) {
  return (static_cast<Eigen::Index>(s) * n_actions + a) * n_min_actions + b;
}

/// Column index of (action, min_action) in an S x (A*B) table.
inline Eigen::Index ab_col(int a, int b, int n_min_actions) {
  return static_cast<Eigen::Index>(a) * n_min_actions + b;
}

/// Deterministic random generator used across the library.
///
/// Sampling from a categorical row consumes exactly one draw, except for
/// rows with a single positive entry which consume none. This keeps runs
/// on degenerate inputs (one-action players, deterministic rows)
/// stream-compatible with their reduced counterparts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform draw in [0, 1).
  double uniform() {
    return (gen_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (two uniforms per pair, cached).
  double normal();

  /// Index drawn from an unnormalized nonnegative weight row.
  int categorical(const Eigen::Ref<const VectorXd>& weights);

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Finite-horizon MDP with per-timestep kernels and known deterministic rewards.
///
/// transition(h) has shape (S*A) x S with rows indexed by sa_row; reward(h)
/// has shape S x A. Time-homogeneous instances may be built with a single
/// slice shared across timesteps (stationary storage). Episodes start from
/// the fixed initial state unless a start distribution is supplied.
class EpisodicMDP {
 public:
  EpisodicMDP(int horizon, int n_states, int n_actions, std::vector<MatrixXd> transitions,
              std::vector<MatrixXd> rewards, int initial_state, double reward_scale = 1.0,
              VectorXd start_distribution = {});

  static EpisodicMDP stationary(int horizon, int n_states, int n_actions, MatrixXd transition,
                                MatrixXd reward, int initial_state, double reward_scale = 1.0);

  int horizon() const { return horizon_; }
  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  int initial_state() const { return initial_state_; }
  bool is_stationary() const { return transitions_.size() == 1; }
  double reward_scale() const { return reward_scale_; }
  bool has_start_distribution() const { return start_distribution_.size() > 0; }
  const VectorXd& start_distribution() const { return start_distribution_; }

  const MatrixXd& transition(int h) const { return transitions_[is_stationary() ? 0 : h]; }
  const MatrixXd& reward(int h) const { return rewards_[rewards_.size() == 1 ? 0 : h]; }
  double reward_at(int h, int s, int a) const { return reward(h)(s, a); }

 private:
  int horizon_, n_states_, n_actions_, initial_state_;
  double reward_scale_;
  std::vector<MatrixXd> transitions_;
  std::vector<MatrixXd> rewards_;
  VectorXd start_distribution_;  // empty: fixed initial state
};

/// Two-player zero-sum Markov game; the max-player owns A actions, the
/// min-player B actions. transition(h) is (S*A*B) x S, reward(h) is S x (A*B).
class ZeroSumMG {
 public:
  ZeroSumMG(int horizon, int n_states, int n_actions, int n_min_actions,
            std::vector<MatrixXd> transitions, std::vector<MatrixXd> rewards, int initial_state);

  static ZeroSumMG stationary(int horizon, int n_states, int n_actions, int n_min_actions,
                              MatrixXd transition, MatrixXd reward, int initial_state);

  int horizon() const { return horizon_; }
  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  int n_min_actions() const { return n_min_actions_; }
  int initial_state() const { return initial_state_; }
  bool is_stationary() const { return transitions_.size() == 1; }

  const MatrixXd& transition(int h) const { return transitions_[is_stationary() ? 0 : h]; }
  const MatrixXd& reward(int h) const { return rewards_[rewards_.size() == 1 ? 0 : h]; }
  double reward_at(int h, int s, int a, int b) const { return reward(h)(s, ab_col(a, b, n_min_actions_)); }

 private:
  int horizon_, n_states_, n_actions_, n_min_actions_, initial_state_;
  std::vector<MatrixXd> transitions_;
  std::vector<MatrixXd> rewards_;
};

/// Markovian policy: prob[h] is S x A with stochastic rows.
struct Policy {
  std::vector<MatrixXd> prob;

  int horizon() const { return static_cast<int>(prob.size()); }
};

/// Joint policy (mu, nu) for a zero-sum game.
struct JointPolicy {
  Policy max_policy;
  Policy min_policy;
};

Policy uniform_policy(int horizon, int n_states, int n_actions);

/// Deterministic policy from per-(h,s) action indices.
Policy deterministic_policy(const std::vector<std::vector<int>>& actions, int n_actions);

void validate_policy(const Policy& policy, int horizon, int n_states, int n_actions,
                     const char* what);

struct Step {
  int state;
  int action;
  int min_action;  // -1 in MDP episodes
  double reward;
  int next_state;
};

/// How the behavior policy of an episode was formed.
struct ExplorationTag {
  std::string mode = "greedy";  // "q-type", "v-type", "eps-greedy", "fixed"
  int override_h = -1;          // timestep with the uniform override, -1 if none
};

struct Episode {
  std::vector<Step> steps;
  ExplorationTag tag;

  double total_reward() const;
};

/// Exact V/Q tables; V has horizon+1 slices with V[H] = 0.
struct ValueTable {
  std::vector<VectorXd> V;
  std::vector<MatrixXd> Q;
};

Episode sample_episode(const EpisodicMDP& env, const Policy& policy, Rng& rng);
Episode sample_episode(const ZeroSumMG& env, const JointPolicy& policy, Rng& rng);

/// Exact policy evaluation by backward recursion over the true kernel.
ValueTable policy_evaluation(const EpisodicMDP& env, const Policy& policy);

/// Exact evaluation of a joint policy in a zero-sum game; Q[h] is S x (A*B).
ValueTable policy_evaluation(const ZeroSumMG& env, const JointPolicy& policy);

// Structured-text (JSON) serialization. Round-trips are lossless at full
// double precision; stationary environments store one kernel slice.
std::string to_text(const EpisodicMDP& env);
std::string to_text(const ZeroSumMG& env);
EpisodicMDP mdp_from_text(const std::string& text);
ZeroSumMG mg_from_text(const std::string& text);

void save_text(const std::string& path, const std::string& text);
std::string load_text(const std::string& path);

}  // namespace mex
