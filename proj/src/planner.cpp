#include "mex/planner.hpp"

#include <limits>
#include <stdexcept>

namespace mex {

int argmax_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  // Ties break toward the lowest index. The tolerance keeps that rule
  // meaningful when backward induction leaves 1e-16-level dust on values
  // that are equal in exact arithmetic.
  const double top = row.maxCoeff();
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (row(j) >= top - 1e-9) {
      return static_cast<int>(j);
    }
  }
  return 0;
}

MatrixXd bellman_optimality_backup(const MatrixXd& q_next, const MatrixXd& transition_h,
                                   const MatrixXd& reward_h) {
  const Eigen::Index S = reward_h.rows();
  const Eigen::Index A = reward_h.cols();
  if (transition_h.rows() != S * A || transition_h.cols() != S) {
    throw std::invalid_argument("bellman_optimality_backup: kernel/reward shape mismatch");
  }
  VectorXd v_next(S);
  for (Eigen::Index s = 0; s < S; ++s) {
    v_next(s) = q_next.row(s).maxCoeff();
  }
  const VectorXd expected = transition_h * v_next;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      expected_by_sa(expected.data(), S, A);
  return reward_h + expected_by_sa;
}

MatrixXd bellman_optimality_backup(const MatrixXd& q_next, const EpisodicMDP& env, int h) {
  return bellman_optimality_backup(q_next, env.transition(h), env.reward(h));
}

MatrixXd bellman_optimality_backup(const MatrixXd& q_next, const ModelBasedHypothesis& model,
                                   const EpisodicMDP& reward_source, int h) {
  return bellman_optimality_backup(q_next, model.kernel(h), reward_source.reward(h));
}

namespace {

/// Backward induction over arbitrary (kernel, reward) slice providers.
template <typename KernelAt, typename RewardAt>
PlanResult plan_impl(int H, int S, int A, KernelAt kernel_at, RewardAt reward_at) {
  PlanResult result;
  result.values.V.assign(H + 1, VectorXd::Zero(S));
  result.values.Q.assign(H, MatrixXd::Zero(S, A));
  result.policy.prob.assign(H, MatrixXd::Zero(S, A));
  MatrixXd q_next = MatrixXd::Zero(S, A);
  for (int h = H - 1; h >= 0; --h) {
    result.values.Q[h] = bellman_optimality_backup(q_next, kernel_at(h), reward_at(h));
    for (int s = 0; s < S; ++s) {
      result.values.V[h](s) = result.values.Q[h].row(s).maxCoeff();
      result.policy.prob[h](s, argmax_row(result.values.Q[h].row(s))) = 1.0;
    }
    q_next = result.values.Q[h];
  }
  return result;
}

template <typename KernelAt, typename RewardAt>
NePlanResult ne_impl(int H, int S, int A, int B, KernelAt kernel_at, RewardAt reward_at) {
  NePlanResult result;
  result.values.V.assign(H + 1, VectorXd::Zero(S));
  result.values.Q.assign(H, MatrixXd::Zero(S, static_cast<Eigen::Index>(A) * B));
  result.policy.max_policy.prob.assign(H, MatrixXd::Zero(S, A));
  result.policy.min_policy.prob.assign(H, MatrixXd::Zero(S, B));
  MatrixXd stage(A, B);
  for (int h = H - 1; h >= 0; --h) {
    const VectorXd expected = kernel_at(h) * result.values.V[h + 1];
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        expected_by_sab(expected.data(), S, static_cast<Eigen::Index>(A) * B);
    result.values.Q[h] = reward_at(h) + expected_by_sab;
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        for (int b = 0; b < B; ++b) {
          stage(a, b) = result.values.Q[h](s, ab_col(a, b, B));
        }
      }
      MatrixGameSolution sol = solve_matrix_game(stage);
      result.values.V[h](s) = sol.value;
      result.policy.max_policy.prob[h].row(s) = sol.row_strategy.transpose();
      result.policy.min_policy.prob[h].row(s) = sol.col_strategy.transpose();
      result.max_duality_gap = std::max(result.max_duality_gap, sol.duality_gap);
    }
  }
  return result;
}

template <typename KernelAt, typename RewardAt>
BrPlanResult br_impl(int H, int S, int A, int B, const Policy& max_policy, KernelAt kernel_at,
                     RewardAt reward_at) {
  BrPlanResult result;
  result.values.V.assign(H + 1, VectorXd::Zero(S));
  result.values.Q.assign(H, MatrixXd::Zero(S, static_cast<Eigen::Index>(A) * B));
  result.min_policy.prob.assign(H, MatrixXd::Zero(S, B));
  for (int h = H - 1; h >= 0; --h) {
    const VectorXd expected = kernel_at(h) * result.values.V[h + 1];
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        expected_by_sab(expected.data(), S, static_cast<Eigen::Index>(A) * B);
    result.values.Q[h] = reward_at(h) + expected_by_sab;
    for (int s = 0; s < S; ++s) {
      // Linear in nu: a pure column response attains the inner infimum.
      // Lowest column index wins ties (same dust tolerance as argmax_row).
      VectorXd response(B);
      for (int b = 0; b < B; ++b) {
        double v = 0.0;
        for (int a = 0; a < A; ++a) {
          v += max_policy.prob[h](s, a) * result.values.Q[h](s, ab_col(a, b, B));
        }
        response(b) = v;
      }
      const double best_value = response.minCoeff();
      int best_b = 0;
      for (int b = 0; b < B; ++b) {
        if (response(b) <= best_value + 1e-9) {
          best_b = b;
          break;
        }
      }
      result.values.V[h](s) = best_value;
      result.min_policy.prob[h](s, best_b) = 1.0;
    }
  }
  return result;
}

}  // namespace

PlanResult plan_optimal(const EpisodicMDP& env) {
  return plan_impl(
      env.horizon(), env.n_states(), env.n_actions(),
      [&](int h) -> const MatrixXd& { return env.transition(h); },
      [&](int h) -> const MatrixXd& { return env.reward(h); });
}

PlanResult plan_optimal(const ModelBasedHypothesis& model, const EpisodicMDP& reward_source) {
  if (model.is_game()) {
    throw std::invalid_argument("plan_optimal: game-kind model");
  }
  if (model.n_states() != reward_source.n_states() ||
      model.n_actions() != reward_source.n_actions() ||
      model.horizon() != reward_source.horizon()) {
    throw std::invalid_argument("plan_optimal: model does not match the reward source");
  }
  return plan_impl(
      model.horizon(), model.n_states(), model.n_actions(),
      [&](int h) -> const MatrixXd& { return model.kernel(h); },
      [&](int h) -> const MatrixXd& { return reward_source.reward(h); });
}

NePlanResult ne_value_iteration(const ZeroSumMG& env) {
  return ne_impl(
      env.horizon(), env.n_states(), env.n_actions(), env.n_min_actions(),
      [&](int h) -> const MatrixXd& { return env.transition(h); },
      [&](int h) -> const MatrixXd& { return env.reward(h); });
}

NePlanResult ne_value_iteration(const ModelBasedHypothesis& model,
                                const ZeroSumMG& reward_source) {
  if (!model.is_game()) {
    throw std::invalid_argument("ne_value_iteration: MDP-kind model");
  }
  return ne_impl(
      model.horizon(), model.n_states(), model.n_actions(), model.n_min_actions(),
      [&](int h) -> const MatrixXd& { return model.kernel(h); },
      [&](int h) -> const MatrixXd& { return reward_source.reward(h); });
}

BrPlanResult best_response_value_iteration(const ZeroSumMG& env, const Policy& max_policy) {
  validate_policy(max_policy, env.horizon(), env.n_states(), env.n_actions(),
                  "best_response_value_iteration");
  return br_impl(
      env.horizon(), env.n_states(), env.n_actions(), env.n_min_actions(), max_policy,
      [&](int h) -> const MatrixXd& { return env.transition(h); },
      [&](int h) -> const MatrixXd& { return env.reward(h); });
}

BrPlanResult best_response_value_iteration(const ModelBasedHypothesis& model,
                                           const ZeroSumMG& reward_source,
                                           const Policy& max_policy) {
  if (!model.is_game()) {
    throw std::invalid_argument("best_response_value_iteration: MDP-kind model");
  }
  validate_policy(max_policy, model.horizon(), model.n_states(), model.n_actions(),
                  "best_response_value_iteration");
  return br_impl(
      model.horizon(), model.n_states(), model.n_actions(), model.n_min_actions(), max_policy,
      [&](int h) -> const MatrixXd& { return model.kernel(h); },
      [&](int h) -> const MatrixXd& { return reward_source.reward(h); });
}

}  // namespace mex
