// Independent reference implementations used only by the tests. Each oracle
// recomputes a quantity by a different route than the library (brute force,
// enumeration, finite differences, first-order iteration) so that agreement
// is meaningful.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cast/core.hpp"

namespace oracles {

using cast::Index;
using cast::Matrix;
using cast::Vector;

// --- linear algebra helpers -------------------------------------------------

inline Vector singular_values(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

inline double nuclear_norm(const Matrix& m) { return singular_values(m).sum(); }

// --- TKNN: boolean transitive closure by repeated squaring ------------------

inline Matrix boolean_closure(Index n, const std::vector<std::pair<Index, Index>>& edges) {
  std::vector<std::vector<bool>> r(static_cast<std::size_t>(n),
                                   std::vector<bool>(static_cast<std::size_t>(n), false));
  for (Index i = 0; i < n; ++i) r[i][i] = true;
  for (const auto& [a, b] : edges) {
    r[a][b] = true;
    r[b][a] = true;
  }
  for (;;) {  // square until fixpoint
    bool changed = false;
    auto next = r;
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < n; ++k)
        if (r[i][k])
          for (Index j = 0; j < n; ++j)
            if (r[k][j] && !next[i][j]) {
              next[i][j] = true;
              changed = true;
            }
    r = std::move(next);
    if (!changed) break;
  }
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = r[i][j] ? 1.0 : 0.0;
  return out;
}

// --- metrics by brute force --------------------------------------------------

inline double purity_bruteforce(const std::vector<int>& truth, const std::vector<int>& pred) {
  const std::size_t n = truth.size();
  std::int64_t hit = 0;
  std::vector<int> pred_ids = pred;
  std::sort(pred_ids.begin(), pred_ids.end());
  pred_ids.erase(std::unique(pred_ids.begin(), pred_ids.end()), pred_ids.end());
  for (int pc : pred_ids) {
    std::vector<int> truth_ids = truth;
    std::sort(truth_ids.begin(), truth_ids.end());
    truth_ids.erase(std::unique(truth_ids.begin(), truth_ids.end()), truth_ids.end());
    std::int64_t best = 0;
    for (int tc : truth_ids) {
      std::int64_t overlap = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (pred[i] == pc && truth[i] == tc) ++overlap;
      best = std::max(best, overlap);
    }
    hit += best;
  }
  return static_cast<double>(hit) / static_cast<double>(n);
}

inline double rand_index_bruteforce(const std::vector<int>& truth, const std::vector<int>& pred) {
  const std::size_t n = truth.size();
  std::int64_t agree = 0, total = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      ++total;
      const bool same_t = truth[i] == truth[j];
      const bool same_p = pred[i] == pred[j];
      if (same_t == same_p) ++agree;
    }
  return static_cast<double>(agree) / static_cast<double>(total);
}

// Exact AMI for n <= 12: the hypergeometric weights are evaluated with exact
// 128-bit factorial arithmetic instead of lgamma.
inline double ami_exact_small(const std::vector<int>& truth_in, const std::vector<int>& pred_in) {
  const std::vector<int> truth = cast::relabel_canonical(truth_in);
  const std::vector<int> pred = cast::relabel_canonical(pred_in);
  const std::int64_t n = static_cast<std::int64_t>(truth.size());
  const int r = *std::max_element(truth.begin(), truth.end()) + 1;
  const int c = *std::max_element(pred.begin(), pred.end()) + 1;
  std::vector<std::vector<std::int64_t>> cnt(r, std::vector<std::int64_t>(c, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) ++cnt[truth[i]][pred[i]];
  std::vector<std::int64_t> a(r, 0), b(c, 0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      a[i] += cnt[i][j];
      b[j] += cnt[i][j];
    }

  auto fact = [](std::int64_t v) {
    __int128 f = 1;
    for (std::int64_t i = 2; i <= v; ++i) f *= i;
    return f;
  };

  const double nd = static_cast<double>(n);
  double mi = 0.0;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      if (cnt[i][j] > 0)
        mi += (cnt[i][j] / nd) * std::log(nd * cnt[i][j] / (double(a[i]) * double(b[j])));

  double emi = 0.0;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      const std::int64_t lo = std::max<std::int64_t>(1, a[i] + b[j] - n);
      const std::int64_t hi = std::min(a[i], b[j]);
      for (std::int64_t nij = lo; nij <= hi; ++nij) {
        const __int128 num = fact(a[i]) * fact(b[j]) * fact(n - a[i]) * fact(n - b[j]);
        const __int128 den = fact(n) * fact(nij) * fact(a[i] - nij) * fact(b[j] - nij) *
                             fact(n - a[i] - b[j] + nij);
        const double p = static_cast<double>(static_cast<long double>(num) /
                                             static_cast<long double>(den));
        emi += (nij / nd) * std::log(nd * nij / (double(a[i]) * double(b[j]))) * p;
      }
    }

  auto entropy = [&](const std::vector<std::int64_t>& sums) {
    double h = 0.0;
    for (std::int64_t v : sums)
      if (v > 0) h -= (v / nd) * std::log(v / nd);
    return h;
  };
  const double denom = std::max(entropy(a), entropy(b)) - emi;
  if (std::abs(denom) < 1e-12) return 1.0;
  return (mi - emi) / denom;
}

// --- ROSC objective and finite differences ----------------------------------

inline double rosc_objective(const Matrix& x, const Matrix& w, double a1, double a2,
                             const Matrix& z) {
  return (x - x * z).squaredNorm() + a1 * z.squaredNorm() + a2 * (z - w).squaredNorm();
}

// Central-difference gradient, step 1e-5.
inline Matrix rosc_gradient_fd(const Matrix& x, const Matrix& w, double a1, double a2,
                               const Matrix& z) {
  const double h = 1e-5;
  Matrix g(z.rows(), z.cols());
  Matrix zp = z;
  for (Index i = 0; i < z.rows(); ++i)
    for (Index j = 0; j < z.cols(); ++j) {
      zp(i, j) = z(i, j) + h;
      const double fp = rosc_objective(x, w, a1, a2, zp);
      zp(i, j) = z(i, j) - h;
      const double fm = rosc_objective(x, w, a1, a2, zp);
      zp(i, j) = z(i, j);
      g(i, j) = (fp - fm) / (2.0 * h);
    }
  return g;
}

// --- sparse (l1) objective and an independent first-order solver ------------

inline double sparse_objective(const Matrix& x, const Matrix& w, double a1, double a2,
                               const Matrix& z) {
  return 0.5 * (x - x * z).squaredNorm() + a1 * z.cwiseAbs().sum() +
         0.5 * a2 * (z - w).squaredNorm();
}

// Proximal-gradient (ISTA) solver for the diag-constrained l1 objective.
// First-order and entirely independent of the ALM route.
inline Matrix sparse_ista(const Matrix& x, const Matrix& w, double a1, double a2, int iters) {
  const Index n = x.cols();
  const Matrix gram = x.transpose() * x;
  const double lipschitz =
      Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues().maxCoeff() + a2;
  const double step = 1.0 / lipschitz;
  Matrix z = Matrix::Zero(n, n);
  for (int t = 0; t < iters; ++t) {
    const Matrix grad = gram * z - gram + a2 * (z - w);
    Matrix zn = z - step * grad;
    const double eta = a1 * step;
    zn = zn.unaryExpr([eta](double v) {
      const double m = std::abs(v) - eta;
      return m <= 0.0 ? 0.0 : (v > 0.0 ? m : -m);
    });
    zn.diagonal().setZero();
    z = std::move(zn);
  }
  return z;
}

// --- CAST column objective and grid search ----------------------------------

inline double casc_objective(const Vector& x, const Matrix& xr, const Vector& w, double a1,
                             double a2, const Vector& z) {
  return 0.5 * (x - xr * z).squaredNorm() + a1 * nuclear_norm(xr * z.asDiagonal()) +
         0.5 * a2 * (z - w).squaredNorm();
}

// Dense grid search over z in [-2,2]^2, step 0.01. Only for 2-coefficient
// problems.
inline std::pair<Vector, double> casc_grid_search(const Vector& x, const Matrix& xr,
                                                  const Vector& w, double a1, double a2) {
  Vector best = Vector::Zero(2);
  double best_f = std::numeric_limits<double>::infinity();
  Vector z(2);
  for (int i = -200; i <= 200; ++i)
    for (int j = -200; j <= 200; ++j) {
      z(0) = i * 0.01;
      z(1) = j * 0.01;
      const double f = casc_objective(x, xr, w, a1, a2, z);
      if (f < best_f) {
        best_f = f;
        best = z;
      }
    }
  return {best, best_f};
}

// --- random instances ---------------------------------------------------------

inline Matrix random_matrix(cast::Rng& rng, Index rows, Index cols, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.next_double(lo, hi);
  return m;
}

inline Matrix random_unit_columns(cast::Rng& rng, Index rows, Index cols) {
  Matrix m = random_matrix(rng, rows, cols);
  for (Index j = 0; j < cols; ++j) {
    while (m.col(j).norm() < 1e-8) m.col(j) = random_matrix(rng, rows, 1);
    m.col(j).normalize();
  }
  return m;
}

}  // namespace oracles
