#pragma once

#include <Eigen/Eigenvalues>

#include <string>
#include <utility>

#include "cast/core.hpp"

namespace cast {

/// Schedule for generating p pseudo-eigenvectors by truncated power
/// iteration. Vector r runs for max(1, base_iters - r * decay) iterations;
/// decreasing counts keep the contribution of the less dominant
/// eigenvectors alive in the later vectors.
struct PiSchedule {
  int p = 4;
  int base_iters = 50;
  int decay = 5;
  std::uint64_t seed = 0;

  int iters_for(int r) const { return std::max(1, base_iters - r * decay); }

  void validate() const {
    if (p < 1) throw ParameterError("PiSchedule: p must be >= 1");
    if (base_iters < 1) throw ParameterError("PiSchedule: base_iters must be >= 1");
    if (decay < 0) throw ParameterError("PiSchedule: decay must be >= 0");
  }

  /// Default schedule for a k-cluster problem: p = max(4, 2k).
  static PiSchedule for_clusters(int k, std::uint64_t seed) {
    PiSchedule s;
    s.p = std::max(4, 2 * k);
    s.seed = seed;
    return s;
  }
};

/// Truncated power iteration: v <- W v / ||W v||_1, run exactly `iters`
/// times. The intermediate vector is a weighted mix of all eigenvectors of
/// W, which is what carries the multi-scale cluster information.
inline Vector power_iterate(const Matrix& Wrn, Vector v0, int iters) {
  detail::require_square(Wrn, "power_iterate");
  if (v0.size() != Wrn.rows())
    throw DimensionError("power_iterate: v0 length does not match matrix size");
  if (v0.lpNorm<1>() == 0.0) throw ParameterError("power_iterate: v0 must be nonzero");
  if (iters < 0) throw ParameterError("power_iterate: iters must be >= 0");
  Vector v = std::move(v0);
  Vector wv(v.size());
  for (int t = 0; t < iters; ++t) {
    wv.noalias() = Wrn * v;
    const double nrm = wv.lpNorm<1>();
    if (nrm == 0.0)
      throw DegenerateInputError("power_iterate: W v vanished at iteration " +
                                 std::to_string(t));
    v = wv / nrm;
  }
  return v;
}

/// p x n matrix whose row r is a truncated power iteration started from an
/// independent seeded random vector (uniform [0,1) entries, mean-centered).
/// Pure function of (Wrn, sched).
inline Matrix generate_pseudo_eigenvectors(const Matrix& Wrn, const PiSchedule& sched) {
  sched.validate();
  detail::require_square(Wrn, "generate_pseudo_eigenvectors");
  const Index n = Wrn.rows();
  Matrix X(sched.p, n);
  for (int r = 0; r < sched.p; ++r) {
    Rng rng(derive_seed(sched.seed, static_cast<std::uint64_t>(r)));
    Vector v0(n);
    for (Index i = 0; i < n; ++i) v0(i) = rng.next_double();
    v0.array() -= v0.mean();  // shrink the component along the trivial eigenvector
    X.row(r) = power_iterate(Wrn, std::move(v0), sched.iters_for(r)).transpose();
  }
  return X;
}

/// PCA whitening of the rows: output rows are mean-centered, mutually
/// uncorrelated and of unit variance ((1/n) X X^T = I). Directions with
/// eigenvalue <= 1e-12 * max are dropped, so the output may have fewer rows.
inline Matrix whiten(const Matrix& X) {
  if (X.rows() < 1 || X.cols() < 1) throw ParameterError("whiten: empty matrix");
  const Index n = X.cols();
  Matrix centered = X;
  for (Index r = 0; r < centered.rows(); ++r) centered.row(r).array() -= centered.row(r).mean();

  const Matrix cov = centered * centered.transpose() / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericError("whiten: eigendecomposition failed");

  const Vector& lambda = eig.eigenvalues();  // ascending
  const double lmax = lambda(lambda.size() - 1);
  if (!(lmax > 0.0))
    throw DegenerateInputError("whiten: all rows constant (zero covariance)");

  std::vector<Index> keep;
  for (Index i = lambda.size() - 1; i >= 0; --i)  // descending variance
    if (lambda(i) > 1e-12 * lmax) keep.push_back(i);

  Matrix out(static_cast<Index>(keep.size()), n);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    Vector dir = eig.eigenvectors().col(keep[r]);
    // deterministic sign: largest-magnitude entry positive
    Index imax;
    dir.cwiseAbs().maxCoeff(&imax);
    if (dir(imax) < 0.0) dir = -dir;
    out.row(static_cast<Index>(r)) =
        dir.transpose() * centered / std::sqrt(lambda(keep[r]));
  }
  return out;
}

/// Scales every column to unit Euclidean norm, producing the feature matrix
/// consumed by the coefficient-matrix solvers.
inline FeatureMatrix normalize_columns(const Matrix& X) {
  Matrix out = X;
  for (Index q = 0; q < out.cols(); ++q) {
    const double nrm = out.col(q).norm();
    if (nrm < 1e-150)
      throw DegenerateInputError("normalize_columns: zero column at index " +
                                 std::to_string(q));
    out.col(q) /= nrm;
  }
  return FeatureMatrix(std::move(out));
}

}  // namespace cast
