#pragma once

#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cast/core.hpp"
#include "cast/similarity.hpp"

namespace cast {

/// Undirected graph whose edges join mutual K-nearest neighbors.
struct MutualKnnGraph {
  Index n = 0;
  std::vector<std::pair<Index, Index>> edges;  ///< pairs with first < second
};

/// Mutual-KNN graph from a precomputed symmetric distance matrix.
/// Edge (i,j) exists iff j is among the K nearest other points of i and
/// vice versa. Distance ties are broken by lower object index.
inline MutualKnnGraph mutual_knn(const Matrix& distances, int K) {
  detail::require_square(distances, "mutual_knn");
  const Index n = distances.rows();
  if (K < 1 || K > n - 1)
    throw ParameterError("mutual_knn: K must be in [1, n-1], got " + std::to_string(K));

  // neighbor[i] = indices of the K nearest other points, ties by lower index
  std::vector<std::vector<Index>> neighbor(static_cast<std::size_t>(n));
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), Index{0});
    order.erase(order.begin() + i);
    std::partial_sort(order.begin(), order.begin() + K, order.end(),
                      [&](Index a, Index b) {
                        if (distances(i, a) != distances(i, b))
                          return distances(i, a) < distances(i, b);
                        return a < b;
                      });
    neighbor[static_cast<std::size_t>(i)].assign(order.begin(), order.begin() + K);
    order.push_back(0);  // restore size for the next iota
  }

  std::vector<std::vector<bool>> is_nn(static_cast<std::size_t>(n),
                                       std::vector<bool>(static_cast<std::size_t>(n), false));
  for (Index i = 0; i < n; ++i)
    for (Index j : neighbor[static_cast<std::size_t>(i)])
      is_nn[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;

  MutualKnnGraph g;
  g.n = n;
  for (Index i = 0; i < n; ++i)
    for (Index j : neighbor[static_cast<std::size_t>(i)])
      if (j > i && is_nn[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])
        g.edges.emplace_back(i, j);
  return g;
}

/// Mutual-KNN graph from point coordinates (Euclidean distance).
inline MutualKnnGraph mutual_knn(const PointSet& points, int K) {
  return mutual_knn(pairwise_distances(points), K);
}

/// Reachability matrix of the TKNN graph: W_ij = 1 iff i and j lie in the
/// same connected component (so W is the transitive closure of the
/// mutual-KNN relation); the diagonal is all 1.
inline ReachabilityMatrix reachability_matrix(const MutualKnnGraph& g) {
  const Index n = g.n;
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  std::function<Index(Index)> find = [&](Index a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  };
  for (const auto& [i, j] : g.edges) {
    const Index ra = find(i), rb = find(j);
    if (ra != rb) parent[static_cast<std::size_t>(ra)] = rb;
  }
  Matrix w(n, n);
  for (Index j = 0; j < n; ++j) {
    const Index rj = find(j);
    for (Index i = 0; i < n; ++i) w(i, j) = find(i) == rj ? 1.0 : 0.0;
  }
  return ReachabilityMatrix(std::move(w));
}

}  // namespace cast
