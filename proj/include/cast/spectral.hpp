#pragma once

#include <Eigen/Eigenvalues>

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cast/core.hpp"
#include "cast/pseudoeig.hpp"
#include "cast/similarity.hpp"
#include "cast/solvers.hpp"
#include "cast/tknn.hpp"

namespace cast {

enum class SolverKind { Rosc, RoscS, Cast };
enum class EmbedKind { Ncuts, Njw };

inline const char* to_string(SolverKind s) {
  switch (s) {
    case SolverKind::Rosc: return "rosc";
    case SolverKind::RoscS: return "rosc-s";
    case SolverKind::Cast: return "cast";
  }
  return "?";
}

inline const char* to_string(EmbedKind e) {
  return e == EmbedKind::Ncuts ? "ncuts" : "njw";
}

/// Everything a matrix-reconstruction pipeline run needs. `seed` is the
/// master seed: the k-means stage draws its stream from derive_seed(seed, 2),
/// and make() wires the power-iteration stream to derive_seed(seed, 1).
struct MethodParams {
  int k = 2;
  int K = 4;  ///< TKNN neighbor count
  SolverKind solver = SolverKind::Cast;
  SolverConfig solver_cfg{};
  PiSchedule pi{};
  int kmeans_runs = 100;
  std::uint64_t seed = 0;

  void validate() const {
    if (k < 2) throw ParameterError("MethodParams: k must be >= 2");
    if (kmeans_runs < 1) throw ParameterError("MethodParams: kmeans_runs must be >= 1");
    if (K < 1) throw ParameterError("MethodParams: K must be >= 1");
    solver_cfg.validate();
    pi.validate();
  }

  static MethodParams make(int k, SolverKind solver, std::uint64_t seed) {
    MethodParams p;
    p.k = k;
    p.solver = solver;
    p.seed = seed;
    p.pi = PiSchedule::for_clusters(k, derive_seed(seed, 1));
    return p;
  }
};

/// k x n spectral embedding: rows are the k smallest eigenvectors of the
/// normalized Laplacian. The random-walk (NCuts) eigenvectors are recovered
/// from the symmetric problem by D^-1/2 scaling; NJW additionally
/// renormalizes each embedding column to unit length. Eigenvector signs are
/// fixed deterministically (first nonzero entry positive).
inline Matrix spectral_embed(const SimilarityMatrix& S, int k, EmbedKind kind) {
  const Index n = S.size();
  if (k < 1 || k >= n)
    throw ParameterError("spectral_embed: k must be in [1, n-1]");
  const Vector deg = detail::degree_vector(S, "spectral_embed");
  const Vector dinv_sqrt = deg.cwiseSqrt().cwiseInverse();
  Matrix lsym = Matrix::Identity(n, n) -
                dinv_sqrt.asDiagonal() * S.values() * dinv_sqrt.asDiagonal();
  lsym = ((lsym + lsym.transpose()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(lsym);
  if (eig.info() != Eigen::Success) throw NumericError("spectral_embed: eigensolver failed");

  Matrix embedding(k, n);
  for (int r = 0; r < k; ++r) {
    Vector v = eig.eigenvectors().col(r);  // ascending eigenvalues
    if (kind == EmbedKind::Ncuts) v = dinv_sqrt.cwiseProduct(v);
    for (Index i = 0; i < n; ++i)
      if (std::abs(v(i)) > 1e-12) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    embedding.row(r) = v.transpose();
  }
  if (kind == EmbedKind::Njw) {
    for (Index c = 0; c < n; ++c) {
      const double nrm = embedding.col(c).norm();
      if (nrm > 1e-150) embedding.col(c) /= nrm;
    }
  }
  return embedding;
}

namespace detail {

/// One seeded Lloyd run over the columns of `features`. Empty clusters are
/// re-seeded at the point farthest from its current centroid (deterministic,
/// ties by lower index).
inline std::vector<int> lloyd_once(const Matrix& features, int k, Rng& rng) {
  const Index n = features.cols();
  // k distinct random columns as starting centroids
  std::vector<Index> centers;
  while (static_cast<int>(centers.size()) < k) {
    const Index c = static_cast<Index>(rng.next_index(static_cast<std::size_t>(n)));
    if (std::find(centers.begin(), centers.end(), c) == centers.end()) centers.push_back(c);
  }
  Matrix centroid(features.rows(), k);
  for (int c = 0; c < k; ++c) centroid.col(c) = features.col(centers[static_cast<std::size_t>(c)]);

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  std::vector<int> prev;
  for (int iter = 0; iter < 300; ++iter) {
    prev = assign;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (features.col(i) - centroid.col(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (features.col(i) - centroid.col(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assign[static_cast<std::size_t>(i)] = best;
    }
    if (assign == prev) break;

    Matrix sum = Matrix::Zero(features.rows(), k);
    std::vector<Index> count(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sum.col(assign[static_cast<std::size_t>(i)]) += features.col(i);
      ++count[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (count[static_cast<std::size_t>(c)] > 0) {
        centroid.col(c) = sum.col(c) / static_cast<double>(count[static_cast<std::size_t>(c)]);
      } else {
        Index far = 0;
        double far_d = -1.0;
        for (Index i = 0; i < n; ++i) {
          const double d =
              (features.col(i) - centroid.col(assign[static_cast<std::size_t>(i)])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centroid.col(c) = features.col(far);
      }
    }
  }
  return assign;
}

}  // namespace detail

/// Runs seeded k-means `runs` times on the columns of `features` and
/// returns the most frequent canonical labeling (ties resolved to the
/// lexicographically smallest sequence). Run r uses the stream
/// derive_seed(seed, r), so results do not depend on execution order.
inline std::vector<int> kmeans_consensus(const Matrix& features, int k, int runs,
                                         std::uint64_t seed) {
  const Index n = features.cols();
  if (k < 1) throw ParameterError("kmeans_consensus: k must be >= 1");
  if (static_cast<Index>(k) > n)
    throw ParameterError("kmeans_consensus: k exceeds number of objects");
  if (runs < 1) throw ParameterError("kmeans_consensus: runs must be >= 1");

  std::map<std::vector<int>, int> votes;
  for (int r = 0; r < runs; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    ++votes[relabel_canonical(detail::lloyd_once(features, k, rng))];
  }
  // modal labeling; std::map iteration order makes ties lexicographic
  const std::vector<int>* best = nullptr;
  int best_votes = -1;
  for (const auto& [labels, v] : votes)
    if (v > best_votes) {
      best_votes = v;
      best = &labels;
    }
  return *best;
}

namespace detail {

template <typename F>
auto pipeline_stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const DegenerateInputError& e) {
    throw DegenerateInputError(std::string(name) + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(std::string(name) + ": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(std::string(name) + ": " + e.what());
  } catch (const ParameterError& e) {
    throw ParameterError(std::string(name) + ": " + e.what());
  }
}

}  // namespace detail

/// Coefficient matrix for the selected solver; shared by cluster() and the
/// matrix-dump tooling. Ignores `reports` entries for the closed form.
inline Matrix reconstruct_coefficients(const FeatureMatrix& X, const ReachabilityMatrix& W,
                                       const MethodParams& params,
                                       std::vector<SolveReport>* reports = nullptr) {
  switch (params.solver) {
    case SolverKind::Rosc:
      return rosc_closed_form(X, W, params.solver_cfg.alpha1, params.solver_cfg.alpha2);
    case SolverKind::RoscS: {
      auto [z, rep] = solve_sparse_alm(X, W, params.solver_cfg);
      if (reports) *reports = {rep};
      return std::move(z);
    }
    case SolverKind::Cast:
      return build_cast_matrix(X, W, params.solver_cfg, reports);
  }
  throw ParameterError("reconstruct_coefficients: unknown solver");
}

/// End-to-end matrix-reconstruction pipeline:
///   1. reachability matrix W of the TKNN graph of the points
///   2. Wrn = D^-1 S
///   3-5. X = normalize_columns(whiten(pseudo-eigenvectors(Wrn)))
///   6. Z* from the selected solver
///   7. Zcheck = (|Z*| + |Z*^T|) / 2
///   8. NCuts spectral step + consensus k-means on Zcheck
/// Errors from the stages are rethrown with the stage name prepended.
inline Clustering cluster(const SimilarityMatrix& S, const PointSet& points,
                          const MethodParams& params,
                          std::vector<SolveReport>* reports = nullptr) {
  params.validate();
  if (S.size() != points.size())
    throw DimensionError("cluster: S and points describe different object counts");

  const ReachabilityMatrix W = detail::pipeline_stage(
      "tknn", [&] { return reachability_matrix(mutual_knn(points, params.K)); });
  const Matrix wrn = detail::pipeline_stage("row_normalize", [&] { return row_normalize(S); });
  const FeatureMatrix X = detail::pipeline_stage("pseudo_eigenvectors", [&] {
    return normalize_columns(whiten(generate_pseudo_eigenvectors(wrn, params.pi)));
  });
  const Matrix zstar = detail::pipeline_stage(
      "solver", [&] { return reconstruct_coefficients(X, W, params, reports); });
  Matrix zcheck = symmetrize_abs(zstar);
  // the closed form carries self-coefficients; the spectral step consumes
  // affinities between distinct objects only (S_ii = 0 convention)
  zcheck.diagonal().setZero();

  const Matrix embedding = detail::pipeline_stage("spectral", [&] {
    return spectral_embed(SimilarityMatrix(zcheck), params.k, EmbedKind::Ncuts);
  });
  Clustering result;
  result.labels = detail::pipeline_stage("kmeans", [&] {
    return kmeans_consensus(embedding, params.k, params.kmeans_runs,
                            derive_seed(params.seed, 2));
  });
  result.k = params.k;
  result.method = to_string(params.solver);
  result.seed = params.seed;
  return result;
}

/// Plain spectral clustering on S itself (the NCuts / NJW baselines).
inline Clustering baseline_cluster(const SimilarityMatrix& S, int k, EmbedKind kind,
                                   std::uint64_t seed, int kmeans_runs = 100) {
  const Matrix embedding = spectral_embed(S, k, kind);
  Clustering result;
  result.labels = kmeans_consensus(embedding, k, kmeans_runs, derive_seed(seed, 2));
  result.k = k;
  result.method = to_string(kind);
  result.seed = seed;
  return result;
}

}  // namespace cast
