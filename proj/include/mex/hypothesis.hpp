#pragma once

#include "mex/core.hpp"

#include <optional>

namespace mex {

enum class HypothesisKind { ModelFreeMdp, ModelFreeMg, ModelBasedMdp, ModelBasedMg };

inline bool is_model_based(HypothesisKind k) {
  return k == HypothesisKind::ModelBasedMdp || k == HypothesisKind::ModelBasedMg;
}
inline bool is_game_kind(HypothesisKind k) {
  return k == HypothesisKind::ModelFreeMg || k == HypothesisKind::ModelBasedMg;
}
std::string kind_name(HypothesisKind k);
HypothesisKind kind_from_name(const std::string& name);

/// Q-function hypothesis. MDP members cache V (row max) and the greedy
/// policy; game members cache the per-state equilibrium value and the
/// equilibrium max-player strategy. Values live in [0, bound] with
/// bound = H by default.
class ModelFreeHypothesis {
 public:
  static ModelFreeHypothesis for_mdp(std::vector<MatrixXd> q, double bound = -1.0);
  static ModelFreeHypothesis for_mg(std::vector<MatrixXd> q, int n_actions, int n_min_actions,
                                    double bound = -1.0);

  bool is_game() const { return game_; }
  int horizon() const { return static_cast<int>(q_.size()); }
  int n_states() const { return static_cast<int>(q_.front().rows()); }
  int n_actions() const { return n_actions_; }
  int n_min_actions() const { return n_min_actions_; }
  double bound() const { return bound_; }

  const MatrixXd& q(int h) const { return q_[h]; }
  /// Cached state values; the boundary slice v_slice(H) is zero.
  const VectorXd& v_slice(int h) const { return v_[h]; }
  double v(int h, int s) const { return v_[h](s); }

  /// Greedy policy of an MDP member (lowest-index tie break).
  const Policy& greedy() const;
  /// Equilibrium max-player strategy of a game member.
  const Policy& ne_max_policy() const;

 private:
  ModelFreeHypothesis() = default;

  bool game_ = false;
  int n_actions_ = 0;
  int n_min_actions_ = 1;
  double bound_ = 0.0;
  std::vector<MatrixXd> q_;
  std::vector<VectorXd> v_;  // horizon + 1 slices
  Policy policy_;            // greedy (MDP) or equilibrium max strategy (game)
};

/// Transition-kernel hypothesis. Exact rows are kept for planning and
/// distance computations; a floored-and-renormalized log view (floor 1e-12)
/// backs the likelihood so that log terms stay finite.
class ModelBasedHypothesis {
 public:
  static ModelBasedHypothesis for_mdp(int horizon, int n_states, int n_actions,
                                      std::vector<MatrixXd> kernels);
  static ModelBasedHypothesis for_mg(int horizon, int n_states, int n_actions, int n_min_actions,
                                     std::vector<MatrixXd> kernels);

  static constexpr double probability_floor = 1e-12;

  bool is_game() const { return game_; }
  int horizon() const { return horizon_; }
  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  int n_min_actions() const { return n_min_actions_; }
  bool is_stationary() const { return kernels_.size() == 1; }

  /// Exact kernel slice, (S*A) x S or (S*A*B) x S.
  const MatrixXd& kernel(int h) const { return kernels_[is_stationary() ? 0 : h]; }
  /// log of the floored kernel entry for (row, next state).
  double log_prob(int h, Eigen::Index row, int next) const {
    return log_kernels_[is_stationary() ? 0 : h](row, next);
  }

  Eigen::Index row_index(int s, int a, int b = 0) const {
    return game_ ? sab_row(s, a, b, n_actions_, n_min_actions_) : sa_row(s, a, n_actions_);
  }

 private:
  ModelBasedHypothesis() = default;

  bool game_ = false;
  int horizon_ = 0, n_states_ = 0, n_actions_ = 0, n_min_actions_ = 1;
  std::vector<MatrixXd> kernels_;
  std::vector<MatrixXd> log_kernels_;
};

/// Finite homogeneous hypothesis class; members are addressed by index in
/// every log and ledger.
struct HypothesisClass {
  HypothesisKind kind = HypothesisKind::ModelBasedMdp;
  std::vector<ModelFreeHypothesis> q_members;
  std::vector<ModelBasedHypothesis> model_members;
  std::vector<VectorXd> linear_thetas;  // populated by linear-mixture construction
  int true_index = -1;
  bool realizable = false;
  bool truncated = false;

  int size() const {
    return static_cast<int>(is_model_based(kind) ? model_members.size() : q_members.size());
  }
  const ModelFreeHypothesis& q_member(int i) const { return q_members[i]; }
  const ModelBasedHypothesis& model_member(int i) const { return model_members[i]; }
};

Policy greedy_policy_of(const ModelFreeHypothesis& f);

struct TabularClassOptions {
  int n_members = 64;            // target size including the true model
  double perturbation = 0.25;    // dense row-noise magnitude
  double min_perturbation = 0.0; // when > 0, spread magnitudes down to this value
  int n_sticky = 0;              // pessimistic variants that seal off high-reward states
  int sticky_extra_states = 2;
  std::uint64_t seed = 0;
  int size_cap = 1 << 20;
};

/// Finite model-based class around the true kernel: optional pessimistic
/// variants first, then dense perturbations, the true model last.
/// Deterministic for a fixed seed; exact duplicates are removed and the
/// size cap truncates with a warning flag.
HypothesisClass enumerate_tabular_model_class(const EpisodicMDP& env,
                                              const TabularClassOptions& options);
HypothesisClass enumerate_tabular_model_class(const ZeroSumMG& env,
                                              const TabularClassOptions& options);

/// Q-function class obtained by planning inside each member of a
/// model-based class; keeps realizability by construction.
HypothesisClass modelfree_class_from_models(const HypothesisClass& models, const EpisodicMDP& env);
HypothesisClass modelfree_class_from_models(const HypothesisClass& models, const ZeroSumMG& env);

/// Feature tensor of a linear-mixture model: kernel rows are phi(s,a,b,.) theta.
struct LinearMixtureFeatures {
  int d = 0;
  int horizon = 0, n_states = 0, n_actions = 0, n_min_actions = 1;
  bool game = false;
  std::vector<MatrixXd> phi;  // per h (or one slice): ((S*A*B)*S) x d

  const MatrixXd& slice(int h) const { return phi[phi.size() == 1 ? 0 : h]; }
  /// Kernel slices induced by theta (no validity filtering).
  std::vector<MatrixXd> realize(const VectorXd& theta) const;
};

/// Model-based class over a theta grid: candidates inducing invalid rows
/// are rejected; theta_star, when given, is appended if missing and flagged
/// as the true hypothesis.
HypothesisClass build_linear_mixture_class(const LinearMixtureFeatures& features,
                                           std::vector<VectorXd> theta_grid,
                                           const std::optional<VectorXd>& theta_star);

std::string to_text(const HypothesisClass& cls);
HypothesisClass class_from_text(const std::string& text);

}  // namespace mex
