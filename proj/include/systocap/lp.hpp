#pragma once

// Dense tableau simplex for the small linear programs that polytope gauges
// reduce to. Problem sizes are a few dozen constraints at most.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace systocap::lp {

/// Maximizes c·x subject to A x <= b over free x. Requires b > 0 so that
/// x = 0 is a feasible starting vertex; throws std::runtime_error if the
/// program is unbounded. Bland's rule is used for pivoting.
inline double maximize_free(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& c) {
  const long m = A.rows();
  const long n = A.cols();
  if (b.size() != m || c.size() != n) throw std::invalid_argument("lp: shape mismatch");
  for (long i = 0; i < m; ++i) {
    if (!(b[i] > 0)) throw std::invalid_argument("lp: right-hand side must be positive");
  }

  // Columns: x+ (n), x- (n), slack (m), rhs.
  const long cols = 2 * n + m;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, cols + 1);
  T.block(0, 0, m, n) = A;
  T.block(0, n, m, n) = -A;
  T.block(0, 2 * n, m, m).setIdentity();
  T.block(0, cols, m, 1) = b;
  T.block(m, 0, 1, n) = -c.transpose();
  T.block(m, n, 1, n) = c.transpose();

  std::vector<long> basis(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = 2 * n + i;

  const double eps = 1e-12;
  for (int iter = 0; iter < 100000; ++iter) {
    long enter = -1;
    for (long j = 0; j < cols; ++j) {
      if (T(m, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    long leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (long i = 0; i < m; ++i) {
      if (T(i, enter) > eps) {
        const double ratio = T(i, cols) / T(i, enter);
        if (ratio < best - eps ||
            (std::abs(ratio - best) <= eps && leave >= 0 &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) throw std::runtime_error("lp: objective unbounded");

    T.row(leave) /= T(leave, enter);
    for (long i = 0; i <= m; ++i) {
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  // Recover x and evaluate the objective directly; this is more accurate
  // than the accumulated tableau entry.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (long i = 0; i < m; ++i) {
    const long j = basis[static_cast<std::size_t>(i)];
    if (j < n) x[j] += T(i, cols);
    else if (j < 2 * n) x[j - n] -= T(i, cols);
  }
  return c.dot(x);
}

}  // namespace systocap::lp
