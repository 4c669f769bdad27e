#pragma once

#include <Eigen/Dense>

namespace mex {

/// Mixed equilibrium of a zero-sum matrix game. The row player maximizes
/// payoff(i, j), the column player minimizes it. duality_gap is
/// max_i (M y)_i - min_j (x^T M)_j evaluated at the returned strategies.
struct MatrixGameSolution {
  Eigen::VectorXd row_strategy;
  Eigen::VectorXd col_strategy;
  double value = 0.0;
  double duality_gap = 0.0;
};

/// Solves the game exactly up to a certified duality gap of 1e-8.
///
/// Support enumeration over square supports when min(A,B) <= 2, dense
/// simplex with a square-support polish step otherwise. Output is a pure
/// function of the payoff matrix.
MatrixGameSolution solve_matrix_game(const Eigen::MatrixXd& payoff);

/// Duality gap of a candidate strategy pair, >= 0 at any feasible pair.
double duality_gap(const Eigen::MatrixXd& payoff, const Eigen::VectorXd& row_strategy,
                   const Eigen::VectorXd& col_strategy);

}  // namespace mex
