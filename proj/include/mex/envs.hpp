#pragma once

#include "mex/core.hpp"
#include "mex/hypothesis.hpp"

namespace mex {

/// 10x10 navigation grid with stochastic moves, a +0.001 per-step reward
/// and a +10 bonus collected when leaving the goal cell into the terminal
/// rest state. Rewards are scaled by 1/12 to fit the [0,1] reward range;
/// the scale is recorded on the environment so harnesses can report
/// unscaled returns. Episodes run for 200 steps; the goal is absorbing.
namespace gridworld {

constexpr int width = 10;
constexpr int height = 10;
constexpr int n_cells = width * height;
constexpr int n_states = n_cells + 1;  // cells plus the terminal rest state
constexpr int n_actions = 4;           // 0 up, 1 right, 2 down, 3 left
constexpr int horizon = 200;
constexpr int start_state = 0;                    // upper-left cell
constexpr int goal_state = n_cells - 1;           // lower-right cell
constexpr int absorbed_state = n_cells;
constexpr double step_reward = 0.001;
constexpr double goal_reward = 10.0;
constexpr double reward_scale = 1.0 / 12.0;

inline int cell(int row, int col) { return row * width + col; }

/// Fixed central 2x3 obstacle block (rows 4-5, columns 4-6).
inline bool in_obstacle(int row, int col) {
  return row >= 4 && row <= 5 && col >= 4 && col <= 6;
}

}  // namespace gridworld

struct GridworldOptions {
  double noise = 0.2;    // probability of moving to a uniform feasible neighbor
  bool obstacle = true;  // keep the central block
  bool goal = true;      // when false the goal cell is an ordinary cell
};

EpisodicMDP make_gridworld(const GridworldOptions& options = {});

/// Random dense-kernel MDP: Dirichlet(1,...,1) transition rows, rewards 1 on
/// a `sparsity` fraction of (h,s,a) triples and 0 elsewhere.
EpisodicMDP make_random_tabular_mdp(int n_states, int n_actions, int horizon, std::uint64_t seed,
                                    double sparsity = 0.2);

/// Random zero-sum game: Dirichlet rows, uniform [0,1] rewards.
ZeroSumMG make_random_tabular_mg(int n_states, int n_actions, int n_min_actions, int horizon,
                                 std::uint64_t seed);

struct LinearMixtureMg {
  ZeroSumMG game;
  LinearMixtureFeatures features;
  VectorXd theta_star;
};

/// Random linear-mixture game: kernel rows are phi(s,a,b,x')^T theta_star
/// with per-tuple feature norm <= 1 and |theta_star|_2 <= sqrt(d). The
/// returned tensor is realized through the same feature contraction used by
/// class construction, so reconstruction from (phi, theta_star) is exact.
LinearMixtureMg make_linear_mixture_mg(int d, int n_states, int n_actions, int n_min_actions,
                                       int horizon, std::uint64_t seed);

/// d = 1 identity embedding of an existing game (theta_star = 1).
LinearMixtureFeatures canonical_features(const ZeroSumMG& game);

}  // namespace mex
