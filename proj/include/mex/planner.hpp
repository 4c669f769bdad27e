#pragma once

#include "mex/core.hpp"
#include "mex/hypothesis.hpp"
#include "mex/matrix_game.hpp"

namespace mex {

struct PlanResult {
  ValueTable values;
  Policy policy;
};

struct NePlanResult {
  ValueTable values;  // Q[h] is S x (A*B), V is the per-state equilibrium value
  JointPolicy policy;
  double max_duality_gap = 0.0;
};

struct BrPlanResult {
  ValueTable values;  // value of (mu, best-responding nu)
  Policy min_policy;  // deterministic best response
};

/// One step of the optimality recursion:
///   Q_h(s,a) = r_h(s,a) + sum_s' P_h(s'|s,a) max_a' Q_next(s',a').
/// q_next must be all-zero at the boundary h = H.
MatrixXd bellman_optimality_backup(const MatrixXd& q_next, const MatrixXd& transition_h,
                                   const MatrixXd& reward_h);
MatrixXd bellman_optimality_backup(const MatrixXd& q_next, const EpisodicMDP& env, int h);
MatrixXd bellman_optimality_backup(const MatrixXd& q_next, const ModelBasedHypothesis& model,
                                   const EpisodicMDP& reward_source, int h);

/// Exact optimal values and a greedy policy (lowest-index tie break).
PlanResult plan_optimal(const EpisodicMDP& env);
PlanResult plan_optimal(const ModelBasedHypothesis& model, const EpisodicMDP& reward_source);

/// Equilibrium value iteration: V_h(s) is the matrix-game value of the
/// Q_h(s,.,.) slice, policies are the per-state equilibrium strategies.
NePlanResult ne_value_iteration(const ZeroSumMG& env);
NePlanResult ne_value_iteration(const ModelBasedHypothesis& model, const ZeroSumMG& reward_source);

/// Min-player best response against a fixed max-player policy. The inner
/// per-state minimization is linear in nu, so a pure response suffices;
/// ties break toward the lowest action index.
BrPlanResult best_response_value_iteration(const ZeroSumMG& env, const Policy& max_policy);
BrPlanResult best_response_value_iteration(const ModelBasedHypothesis& model,
                                           const ZeroSumMG& reward_source,
                                           const Policy& max_policy);

/// First index attaining the row maximum.
int argmax_row(const Eigen::Ref<const Eigen::RowVectorXd>& row);

}  // namespace mex
