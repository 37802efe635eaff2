#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cast/core.hpp"

namespace cast {

/// n points in d-dimensional Euclidean space, one row per point.
class PointSet {
 public:
  explicit PointSet(Matrix coords) : coords_(std::move(coords)) {
    if (coords_.rows() < 1) throw ParameterError("PointSet: need at least one point");
    if (!coords_.allFinite()) throw ParameterError("PointSet: non-finite coordinate");
  }

  Index size() const { return coords_.rows(); }
  Index dim() const { return coords_.cols(); }
  const Matrix& coords() const { return coords_; }
  Vector point(Index i) const { return coords_.row(i).transpose(); }

 private:
  Matrix coords_;
};

/// Dense n x n Euclidean distance matrix. One pass shared by the similarity
/// constructions and the TKNN graph.
inline Matrix pairwise_distances(const PointSet& points) {
  const Index n = points.size();
  const Matrix& c = points.coords();
  const Vector sq = c.rowwise().squaredNorm();
  Matrix d2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) - 2.0 * (c * c.transpose());
  Matrix d = d2.cwiseMax(0.0).cwiseSqrt();
  d.diagonal().setZero();
  // exact symmetry regardless of rounding in the gemm
  return ((d + d.transpose()) / 2.0).eval();
}

/// Gaussian-kernel affinities S_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)),
/// zero diagonal.
inline SimilarityMatrix gaussian_similarity(const PointSet& points, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian_similarity: sigma must be > 0");
  const Index n = points.size();
  const Matrix d = pairwise_distances(points);
  Matrix s(n, n);
  const double denom = 2.0 * sigma * sigma;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      s(i, j) = i == j ? 0.0 : std::exp(-d(i, j) * d(i, j) / denom);
  return SimilarityMatrix(std::move(s));
}

/// Locally scaled affinities S_ij = exp(-||x_i - x_j||^2 / (sigma_i sigma_j))
/// where sigma_i is the distance from x_i to its l-th nearest other point.
/// A zero sigma_i (duplicate points) falls back to the smallest positive
/// pairwise distance in the whole set.
inline SimilarityMatrix locally_scaled_similarity(const PointSet& points, int l = 7) {
  const Index n = points.size();
  if (l < 1 || l > n - 1)
    throw ParameterError("locally_scaled_similarity: l must be in [1, n-1], got " +
                         std::to_string(l));
  const Matrix d = pairwise_distances(points);

  Vector sigma(n);
  std::vector<double> row(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (Index j = 0; j < n; ++j)
      if (j != i) row[m++] = d(i, j);
    std::nth_element(row.begin(), row.begin() + (l - 1), row.end());
    sigma(i) = row[static_cast<std::size_t>(l - 1)];
  }

  if ((sigma.array() <= 0.0).any()) {
    double min_pos = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j)
      for (Index i = j + 1; i < n; ++i)
        if (d(i, j) > 0.0) min_pos = std::min(min_pos, d(i, j));
    if (!std::isfinite(min_pos))
      throw DegenerateInputError("locally_scaled_similarity: all points coincide");
    for (Index i = 0; i < n; ++i)
      if (sigma(i) <= 0.0) sigma(i) = min_pos;
  }

  Matrix s(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      s(i, j) = i == j ? 0.0 : std::exp(-d(i, j) * d(i, j) / (sigma(i) * sigma(j)));
  return SimilarityMatrix(std::move(s));
}

namespace detail {
inline Vector degree_vector(const SimilarityMatrix& S, const char* what) {
  const Vector deg = S.values().rowwise().sum();
  for (Index i = 0; i < deg.size(); ++i)
    if (!(deg(i) > 0.0))
      throw DegenerateInputError(std::string(what) + ": zero similarity row at index " +
                                 std::to_string(i) + " (isolated object)");
  return deg;
}
}  // namespace detail

/// Row-stochastic W = D^-1 S, the power-iteration operator.
inline Matrix row_normalize(const SimilarityMatrix& S) {
  const Vector deg = detail::degree_vector(S, "row_normalize");
  return deg.cwiseInverse().asDiagonal() * S.values();
}

enum class LaplacianKind { RandomWalk, Symmetric };

/// Normalized graph Laplacian: D^-1 (D - S) for RandomWalk,
/// D^-1/2 (D - S) D^-1/2 for Symmetric.
inline Matrix laplacian(const SimilarityMatrix& S, LaplacianKind kind) {
  const Vector deg = detail::degree_vector(S, "laplacian");
  const Index n = S.size();
  Matrix lap = Matrix::Zero(n, n);
  switch (kind) {
    case LaplacianKind::RandomWalk:
      lap = Matrix::Identity(n, n) - deg.cwiseInverse().asDiagonal() * S.values();
      break;
    case LaplacianKind::Symmetric: {
      const Vector dinv_sqrt = deg.cwiseSqrt().cwiseInverse();
      lap = Matrix::Identity(n, n) -
            dinv_sqrt.asDiagonal() * S.values() * dinv_sqrt.asDiagonal();
      lap = ((lap + lap.transpose()) / 2.0).eval();
      break;
    }
  }
  return lap;
}

}  // namespace cast
