#include "mex/envs.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mex {

EpisodicMDP make_gridworld(const GridworldOptions& options) {
  using namespace gridworld;
  if (options.noise < 0.0 || options.noise > 1.0) {
    throw std::invalid_argument("make_gridworld: noise must lie in [0,1]");
  }
  const auto blocked = [&](int row, int col) {
    return options.obstacle && in_obstacle(row, col);
  };
  const bool has_goal = options.goal;

  MatrixXd transition = MatrixXd::Zero(static_cast<Eigen::Index>(n_states) * n_actions, n_states);
  MatrixXd reward = MatrixXd::Constant(n_states, n_actions, step_reward * reward_scale);

  // Terminal rest state: self loop, step reward only.
  for (int a = 0; a < n_actions; ++a) {
    transition(sa_row(absorbed_state, a, n_actions), absorbed_state) = 1.0;
  }

  const int dr[n_actions] = {-1, 0, 1, 0};
  const int dc[n_actions] = {0, 1, 0, -1};
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const int s = cell(row, col);
      if (has_goal && s == goal_state) {
        // The +10 bonus is collected on the step taken from the goal cell.
        for (int a = 0; a < n_actions; ++a) {
          transition(sa_row(s, a, n_actions), absorbed_state) = 1.0;
          reward(s, a) = (goal_reward + step_reward) * reward_scale;
        }
        continue;
      }
      if (blocked(row, col)) {
        for (int a = 0; a < n_actions; ++a) {
          transition(sa_row(s, a, n_actions), s) = 1.0;  // unreachable filler rows
        }
        continue;
      }
      std::vector<int> neighbors;
      for (int a = 0; a < n_actions; ++a) {
        const int nr = row + dr[a];
        const int nc = col + dc[a];
        if (nr >= 0 && nr < height && nc >= 0 && nc < width && !blocked(nr, nc)) {
          neighbors.push_back(cell(nr, nc));
        }
      }
      for (int a = 0; a < n_actions; ++a) {
        const Eigen::Index r = sa_row(s, a, n_actions);
        const int nr = row + dr[a];
        const int nc = col + dc[a];
        const bool feasible =
            nr >= 0 && nr < height && nc >= 0 && nc < width && !blocked(nr, nc);
        const int intended = feasible ? cell(nr, nc) : s;  // bumping a wall stays put
        transition(r, intended) += 1.0 - options.noise;
        if (neighbors.empty()) {
          transition(r, s) += options.noise;
        } else {
          const double share = options.noise / static_cast<double>(neighbors.size());
          for (int n : neighbors) {
            transition(r, n) += share;
          }
        }
      }
    }
  }
  return EpisodicMDP::stationary(horizon, n_states, n_actions, std::move(transition),
                                 std::move(reward), start_state, reward_scale);
}

namespace {

MatrixXd dirichlet_rows(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      double u;
      do {
        u = rng.uniform();
      } while (u <= 0.0);
      m(i, j) = -std::log(u);
      sum += m(i, j);
    }
    m.row(i) /= sum;
  }
  return m;
}

}  // namespace

EpisodicMDP make_random_tabular_mdp(int n_states, int n_actions, int horizon, std::uint64_t seed,
                                    double sparsity) {
  Rng rng(seed);
  std::vector<MatrixXd> transitions, rewards;
  transitions.reserve(horizon);
  rewards.reserve(horizon);
  for (int h = 0; h < horizon; ++h) {
    transitions.push_back(
        dirichlet_rows(static_cast<Eigen::Index>(n_states) * n_actions, n_states, rng));
  }
  for (int h = 0; h < horizon; ++h) {
    MatrixXd r(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) {
      for (int a = 0; a < n_actions; ++a) {
        r(s, a) = rng.uniform() < sparsity ? 1.0 : 0.0;
      }
    }
    rewards.push_back(std::move(r));
  }
  return EpisodicMDP(horizon, n_states, n_actions, std::move(transitions), std::move(rewards), 0);
}

ZeroSumMG make_random_tabular_mg(int n_states, int n_actions, int n_min_actions, int horizon,
                                 std::uint64_t seed) {
  Rng rng(seed);
  std::vector<MatrixXd> transitions, rewards;
  transitions.reserve(horizon);
  rewards.reserve(horizon);
  for (int h = 0; h < horizon; ++h) {
    transitions.push_back(dirichlet_rows(
        static_cast<Eigen::Index>(n_states) * n_actions * n_min_actions, n_states, rng));
  }
  for (int h = 0; h < horizon; ++h) {
    MatrixXd r(n_states, static_cast<Eigen::Index>(n_actions) * n_min_actions);
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      for (Eigen::Index j = 0; j < r.cols(); ++j) {
        r(i, j) = rng.uniform();
      }
    }
    rewards.push_back(std::move(r));
  }
  return ZeroSumMG(horizon, n_states, n_actions, n_min_actions, std::move(transitions),
                   std::move(rewards), 0);
}

LinearMixtureMg make_linear_mixture_mg(int d, int n_states, int n_actions, int n_min_actions,
                                       int horizon, std::uint64_t seed) {
  if (d < 1) {
    throw std::invalid_argument("make_linear_mixture_mg: d must be >= 1");
  }
  Rng rng(seed);
  const Eigen::Index kernel_rows =
      static_cast<Eigen::Index>(n_states) * n_actions * n_min_actions;
  const double sqrt_d = std::sqrt(static_cast<double>(d));

  constexpr int kResampleBudget = 100;
  for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
    // Base kernels p_j spread as feature columns phi_j = p_j / sqrt(d);
    // theta = sqrt(d) * w for simplex weights w keeps every induced row a
    // convex combination of the bases and both norm bounds satisfied.
    LinearMixtureFeatures features;
    features.d = d;
    features.horizon = horizon;
    features.n_states = n_states;
    features.n_actions = n_actions;
    features.n_min_actions = n_min_actions;
    features.game = true;
    features.phi.reserve(horizon);
    for (int h = 0; h < horizon; ++h) {
      MatrixXd phi(kernel_rows * n_states, d);
      for (int j = 0; j < d; ++j) {
        const MatrixXd base = dirichlet_rows(kernel_rows, n_states, rng);
        for (Eigen::Index r = 0; r < kernel_rows; ++r) {
          for (int c = 0; c < n_states; ++c) {
            phi(r * n_states + c, j) = base(r, c) / sqrt_d;
          }
        }
      }
      features.phi.push_back(std::move(phi));
    }

    VectorXd w(d);
    double sum = 0.0;
    for (int j = 0; j < d; ++j) {
      double u;
      do {
        u = rng.uniform();
      } while (u <= 0.0);
      w(j) = u;
      sum += u;
    }
    w /= sum;
    const VectorXd theta_star = sqrt_d * w;

    std::vector<MatrixXd> kernels = features.realize(theta_star);
    bool valid = true;
    for (const MatrixXd& k : kernels) {
      for (Eigen::Index r = 0; r < k.rows() && valid; ++r) {
        if ((k.row(r).array() < 0.0).any() || std::abs(k.row(r).sum() - 1.0) > 1e-12) {
          valid = false;
        }
      }
      if (!valid) break;
    }
    if (!valid) {
      continue;
    }

    std::vector<MatrixXd> rewards;
    rewards.reserve(horizon);
    for (int h = 0; h < horizon; ++h) {
      MatrixXd r(n_states, static_cast<Eigen::Index>(n_actions) * n_min_actions);
      for (Eigen::Index i = 0; i < r.rows(); ++i) {
        for (Eigen::Index j = 0; j < r.cols(); ++j) {
          r(i, j) = rng.uniform();
        }
      }
      rewards.push_back(std::move(r));
    }
    ZeroSumMG game(horizon, n_states, n_actions, n_min_actions, std::move(kernels),
                   std::move(rewards), 0);
    return LinearMixtureMg{std::move(game), std::move(features), theta_star};
  }
  throw std::runtime_error("make_linear_mixture_mg: resampling budget exceeded");
}

LinearMixtureFeatures canonical_features(const ZeroSumMG& game) {
  LinearMixtureFeatures features;
  features.d = 1;
  features.horizon = game.horizon();
  features.n_states = game.n_states();
  features.n_actions = game.n_actions();
  features.n_min_actions = game.n_min_actions();
  features.game = true;
  const int n = game.is_stationary() ? 1 : game.horizon();
  for (int h = 0; h < n; ++h) {
    const MatrixXd& k = game.transition(h);
    MatrixXd phi(k.rows() * k.cols(), 1);
    for (Eigen::Index r = 0; r < k.rows(); ++r) {
      for (Eigen::Index c = 0; c < k.cols(); ++c) {
        phi(r * k.cols() + c, 0) = k(r, c);
      }
    }
    features.phi.push_back(std::move(phi));
  }
  return features;
}

}  // namespace mex
