#include "mex/matrix_game.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mex {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kGapTol = 1e-8;
constexpr double kFeasTol = 1e-9;

/// Fraction-free (Bareiss) determinant. Exact in doubles for small integer
/// matrices, numerically stable enough at the sizes used here (<= 11).
double det_bareiss(MatrixXd m) {
  const Eigen::Index n = m.rows();
  double sign = 1.0;
  double prev = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0.0) {
      Eigen::Index pivot = -1;
      for (Eigen::Index i = k + 1; i < n; ++i) {
        if (m(i, k) != 0.0) {
          pivot = i;
          break;
        }
      }
      if (pivot < 0) {
        return 0.0;
      }
      m.row(k).swap(m.row(pivot));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) {
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
      }
      m(i, k) = 0.0;
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

/// Cramer solve of A z = rhs via Bareiss determinants. Returns false when
/// the system is (numerically) singular.
bool cramer_solve(const MatrixXd& a, const VectorXd& rhs, VectorXd& out) {
  const Eigen::Index n = a.rows();
  const double d = det_bareiss(a);
  if (d == 0.0 || !std::isfinite(d)) {
    return false;
  }
  out.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    MatrixXd aj = a;
    aj.col(j) = rhs;
    out(j) = det_bareiss(aj) / d;
  }
  return out.allFinite();
}

/// Solves the indifference system on a square support pair. Unknowns are the
/// supported strategy weights of one player plus the game value.
bool support_solve(const MatrixXd& payoff, const std::vector<int>& rows,
                   const std::vector<int>& cols, MatrixGameSolution& out) {
  const int k = static_cast<int>(rows.size());
  const Eigen::Index a_n = payoff.rows();
  const Eigen::Index b_n = payoff.cols();

  // Column strategy: rows in the support are indifferent and earn the value.
  MatrixXd sys = MatrixXd::Zero(k + 1, k + 1);
  VectorXd rhs = VectorXd::Zero(k + 1);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      sys(i, j) = payoff(rows[i], cols[j]);
    }
    sys(i, k) = -1.0;
  }
  sys.row(k).head(k).setOnes();
  rhs(k) = 1.0;
  VectorXd y_sol;
  if (!cramer_solve(sys, rhs, y_sol)) {
    return false;
  }

  // Row strategy from the transposed system.
  MatrixXd sys_t = MatrixXd::Zero(k + 1, k + 1);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) {
      sys_t(j, i) = payoff(rows[i], cols[j]);
    }
    sys_t(j, k) = -1.0;
  }
  sys_t.row(k).head(k).setOnes();
  VectorXd x_sol;
  if (!cramer_solve(sys_t, rhs, x_sol)) {
    return false;
  }

  if ((y_sol.head(k).array() < -kFeasTol).any() || (x_sol.head(k).array() < -kFeasTol).any()) {
    return false;
  }

  VectorXd x = VectorXd::Zero(a_n);
  VectorXd y = VectorXd::Zero(b_n);
  bool clamped = false;
  for (int i = 0; i < k; ++i) {
    x(rows[i]) = x_sol(i);
    y(cols[i]) = y_sol(i);
    if (x_sol(i) < 0.0 || y_sol(i) < 0.0) {
      clamped = true;
    }
  }
  if (clamped) {
    x = x.cwiseMax(0.0);
    y = y.cwiseMax(0.0);
    x /= x.sum();
    y /= y.sum();
  } else {
    const double xs = x.sum();
    const double ys = y.sum();
    if (xs != 1.0) x /= xs;
    if (ys != 1.0) y /= ys;
  }

  out.row_strategy = std::move(x);
  out.col_strategy = std::move(y);
  out.value = 0.5 * (x_sol(k) + y_sol(k));
  out.duality_gap = duality_gap(payoff, out.row_strategy, out.col_strategy);
  return true;
}

void enumerate_supports(int n, int size, std::vector<std::vector<int>>& out) {
  if (size == 1) {
    for (int i = 0; i < n; ++i) {
      out.push_back({i});
    }
    return;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      out.push_back({i, j});
    }
  }
}

bool solve_by_support_enumeration(const MatrixXd& payoff, MatrixGameSolution& out) {
  const int a_n = static_cast<int>(payoff.rows());
  const int b_n = static_cast<int>(payoff.cols());
  const int max_size = std::min(std::min(a_n, b_n), 2);
  MatrixGameSolution best;
  best.duality_gap = std::numeric_limits<double>::infinity();
  for (int size = 1; size <= max_size; ++size) {
    std::vector<std::vector<int>> row_supports, col_supports;
    enumerate_supports(a_n, size, row_supports);
    enumerate_supports(b_n, size, col_supports);
    for (const auto& rows : row_supports) {
      for (const auto& cols : col_supports) {
        MatrixGameSolution candidate;
        if (!support_solve(payoff, rows, cols, candidate)) {
          continue;
        }
        if (candidate.duality_gap <= 1e-10) {
          out = candidate;
          return true;
        }
        if (candidate.duality_gap < best.duality_gap) {
          best = candidate;
        }
      }
    }
  }
  if (best.duality_gap <= kGapTol) {
    out = best;
    return true;
  }
  return false;
}

/// Dense tableau simplex with Bland's rule for
///   max 1^T w  s.t.  M' w <= 1, w >= 0,
/// where M' = payoff + shift > 0. The optimal w rescales to the column
/// strategy, the slack reduced costs rescale to the row strategy.
bool solve_by_simplex(const MatrixXd& payoff, MatrixGameSolution& out) {
  const Eigen::Index m = payoff.rows();
  const Eigen::Index n = payoff.cols();
  const double shift = 1.0 - payoff.minCoeff();
  MatrixXd mp = payoff.array() + shift;

  MatrixXd tableau = MatrixXd::Zero(m + 1, n + m + 1);
  tableau.block(0, 0, m, n) = mp;
  tableau.block(0, n, m, m) = MatrixXd::Identity(m, m);
  tableau.block(0, n + m, m, 1).setOnes();
  tableau.row(m).head(n).setConstant(-1.0);

  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    basis[i] = n + i;
  }

  const Eigen::Index max_iters = 64 * (n + m) * (n + m) + 256;
  for (Eigen::Index iter = 0; iter < max_iters; ++iter) {
    // Bland: entering variable is the lowest-index negative reduced cost.
    Eigen::Index entering = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (tableau(m, j) < -1e-12) {
        entering = j;
        break;
      }
    }
    if (entering < 0) {
      break;  // optimal
    }
    Eigen::Index leaving_row = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double coef = tableau(i, entering);
      if (coef > 1e-12) {
        const double ratio = tableau(i, n + m) / coef;
        if (ratio < best_ratio - 1e-15 ||
            (ratio < best_ratio + 1e-15 &&
             (leaving_row < 0 || basis[i] < basis[leaving_row]))) {
          best_ratio = ratio;
          leaving_row = i;
        }
      }
    }
    if (leaving_row < 0) {
      return false;  // unbounded; cannot happen with a positive matrix
    }
    tableau.row(leaving_row) /= tableau(leaving_row, entering);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leaving_row && tableau(i, entering) != 0.0) {
        tableau.row(i) -= tableau(i, entering) * tableau.row(leaving_row);
      }
    }
    basis[leaving_row] = entering;
  }

  VectorXd w = VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < n) {
      w(basis[i]) = tableau(i, n + m);
    }
  }
  VectorXd u(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    u(i) = tableau(m, n + i);  // dual values from slack reduced costs
  }
  const double w_sum = w.sum();
  const double u_sum = u.sum();
  if (w_sum <= 0.0 || u_sum <= 0.0) {
    return false;
  }
  out.col_strategy = w / w_sum;
  out.row_strategy = (u / u_sum).cwiseMax(0.0);
  out.row_strategy /= out.row_strategy.sum();
  out.value = 1.0 / w_sum - shift;
  out.duality_gap = duality_gap(payoff, out.row_strategy, out.col_strategy);
  return true;
}

/// Re-solves the indifference system on the supports identified by the
/// simplex solution. Recovers exact rational solutions on small integer
/// payoffs and generally tightens the certified gap.
void polish(const MatrixXd& payoff, MatrixGameSolution& sol) {
  std::vector<int> rows, cols;
  for (Eigen::Index i = 0; i < sol.row_strategy.size(); ++i) {
    if (sol.row_strategy(i) > 1e-9) {
      rows.push_back(static_cast<int>(i));
    }
  }
  for (Eigen::Index j = 0; j < sol.col_strategy.size(); ++j) {
    if (sol.col_strategy(j) > 1e-9) {
      cols.push_back(static_cast<int>(j));
    }
  }
  if (rows.empty() || rows.size() != cols.size() || rows.size() > 11) {
    return;
  }
  MatrixGameSolution refined;
  if (support_solve(payoff, rows, cols, refined) && refined.duality_gap <= sol.duality_gap) {
    sol = refined;
  }
}

}  // namespace

double duality_gap(const MatrixXd& payoff, const VectorXd& row_strategy,
                   const VectorXd& col_strategy) {
  const VectorXd row_payoffs = payoff * col_strategy;          // best row deviation
  const Eigen::RowVectorXd col_payoffs = row_strategy.transpose() * payoff;
  return row_payoffs.maxCoeff() - col_payoffs.minCoeff();
}

MatrixGameSolution solve_matrix_game(const MatrixXd& payoff) {
  if (payoff.rows() < 1 || payoff.cols() < 1) {
    throw std::invalid_argument("solve_matrix_game: empty payoff matrix");
  }
  if (!payoff.allFinite()) {
    throw std::invalid_argument("solve_matrix_game: payoff has non-finite entries");
  }

  MatrixGameSolution sol;
  if (std::min(payoff.rows(), payoff.cols()) <= 2) {
    if (solve_by_support_enumeration(payoff, sol)) {
      return sol;
    }
  }
  if (!solve_by_simplex(payoff, sol)) {
    throw std::runtime_error("solve_matrix_game: simplex failed to converge");
  }
  polish(payoff, sol);
  return sol;
}

}  // namespace mex
