#pragma once

#include "mex/core.hpp"
#include "mex/hypothesis.hpp"

#include <span>

namespace mex {

/// Squared Hellinger distance 0.5 * sum (sqrt p - sqrt q)^2, in [0, 1].
double hellinger_sq(const Eigen::Ref<const VectorXd>& p, const Eigen::Ref<const VectorXd>& q);

/// Sampled generalized Bellman residual of an MDP hypothesis on one step:
///   Q_{h,f}(x,a) - r - V_{h+1,f}(x').
double td_residual(const ModelFreeHypothesis& f, int h, const Step& step);

// Reference implementations of the estimation losses; each evaluates the
// full double sum over the stored history. The incremental LossLedger below
// computes the same quantities in O(|class|) per appended episode and is
// cross-checked against these in tests.

/// Squared Bellman loss with the infimum over the class's h-components
/// subtracted; nonnegative since f's own component enters the infimum.
double modelfree_loss(const ModelFreeHypothesis& f, std::span<const Episode> history,
                      const HypothesisClass& cls, int h);

/// Negative log-likelihood of observed next states under the floored kernel.
double modelbased_nll(const ModelBasedHypothesis& f, std::span<const Episode> history, int h);

/// Squared equilibrium Bellman loss for the max-player (game, model-free).
double mg_ne_loss(const ModelFreeHypothesis& f, std::span<const Episode> history,
                  const HypothesisClass& cls, int h);

/// Squared best-response Bellman loss for the min-player given the
/// max-player policy mu (game, model-free).
double mg_br_loss(const ModelFreeHypothesis& g, const Policy& mu,
                  std::span<const Episode> history, const HypothesisClass& cls, int h);

/// Expected-residual discrepancy at timestep h under a state-action weight
/// table rho (S x A), evaluated exactly through the true kernel:
///   sum_{x,a} rho(x,a) * (Q_{h,f}(x,a) - r_h(x,a) - E_{x'}[V_{h+1,f}(x')])^2.
/// The context hypothesis is accepted for signature fidelity; the residual
/// does not depend on it.
double discrepancy_modelfree(const ModelFreeHypothesis& f, const ModelFreeHypothesis* context,
                             const EpisodicMDP& env, const MatrixXd& rho, int h);

/// Kernel-row Hellinger discrepancy under rho (S x A):
///   sum_{x,a} rho(x,a) * hellinger_sq(P_f(.|x,a), P_env(.|x,a)).
double discrepancy_modelbased(const ModelBasedHypothesis& f, const EpisodicMDP& env,
                              const MatrixXd& rho, int h);
/// Game variant; rho is S x (A*B).
double discrepancy_modelbased(const ModelBasedHypothesis& f, const ZeroSumMG& env,
                              const MatrixXd& rho, int h);

/// Incremental loss ledger over a fixed hypothesis class.
///
/// Negative log-likelihood entries accumulate directly. The squared
/// residual losses factor as
///   sum_s (A_s(i) - B_s(j))^2 - inf_i' sum_s (A_s(i') - B_s(j))^2
/// with A_s(i) = Q_{h,i}(x_s, a_s[, b_s]) - r_s depending on the sampled
/// pair and B_s(j) a function of the sampled next state only. The ledger
/// stores sum A^2 per member and sum A per (member, next state); the B^2
/// term cancels between the two branches, so losses evaluate exactly in
/// O(|class| * S) without rescanning history.
class LossLedger {
 public:
  LossLedger(const HypothesisClass& cls, int n_states);

  void add_episode(const Episode& episode);

  int episodes() const { return episodes_; }
  int horizon() const { return horizon_; }
  int class_size() const;

  /// L_h^k for member i: NLL for model-based classes, the infimum-subtracted
  /// squared Bellman loss (equilibrium targets for game classes) otherwise.
  double loss(int member, int h) const;
  double total_loss(int member) const;

  /// Min-player best-response loss against mu (game model-free classes);
  /// model-based game classes reuse the NLL, independent of mu.
  double br_loss(int member, const Policy& mu, int h) const;
  double br_total_loss(int member, const Policy& mu) const;

  /// CSV rows "k,h,hypothesis_index,L_value" of the current snapshot.
  std::string snapshot_csv() const;

 private:
  VectorXd br_next_values(int member, const Policy& mu, int h) const;
  double residual_branch(int component, const VectorXd& next_values, int h) const;

  const HypothesisClass* cls_;
  int n_states_;
  int horizon_;
  int episodes_ = 0;

  // model-based: cumulative NLL per (member, h)
  MatrixXd nll_;

  // model-free: per h, sum of A_s^2 per member and sum of A_s per (member, x')
  std::vector<VectorXd> sum_a2_;      // [h](member)
  std::vector<MatrixXd> sum_a_next_;  // [h](member, x')
};

}  // namespace mex
