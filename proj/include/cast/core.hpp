#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched or non-square matrix dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument violates a precondition (range, sign, shape of a flag value).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid input on which the operation is undefined
/// (zero similarity row, all-constant features, zero column, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A numeric routine (factorization, SVD, eigensolver) failed.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents.
class ParseError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Deterministic RNG
// ---------------------------------------------------------------------------

/// splitmix64 stream. Self-contained so that seeded runs produce identical
/// bytes regardless of the standard library in use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::size_t next_index(std::size_t n) {
    if (n == 0) throw ParameterError("Rng::next_index: n must be positive");
    const std::uint64_t rem = (UINT64_MAX % n + 1) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (rem == 0 || r < UINT64_MAX - rem + 1) return static_cast<std::size_t>(r % n);
    }
  }

 private:
  std::uint64_t state_;
};

/// Independent seed for substream `stream` of a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r(seed ^ (0xd1342543de82ef95ULL * (stream + 1)));
  return r.next_u64();
}

// ---------------------------------------------------------------------------
// Parallel helper
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n). Work items must be independent and write only
/// to per-index slots, so the assembled result equals sequential execution.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Validated matrix roles
// ---------------------------------------------------------------------------

namespace detail {
inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw DimensionError(std::string(what) + ": matrix must be square, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}
}  // namespace detail

/// Symmetric nonnegative affinity matrix with zero diagonal. Stored exactly
/// symmetric (input symmetric within 1e-12 is averaged with its transpose).
class SimilarityMatrix {
 public:
  explicit SimilarityMatrix(Matrix values) : values_(std::move(values)) {
    detail::require_square(values_, "SimilarityMatrix");
    const Index n = values_.rows();
    for (Index i = 0; i < n; ++i) {
      if (std::abs(values_(i, i)) > 1e-12)
        throw ParameterError("SimilarityMatrix: nonzero diagonal at index " + std::to_string(i));
      values_(i, i) = 0.0;
    }
    if ((values_ - values_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw ParameterError("SimilarityMatrix: input is not symmetric within 1e-12");
    if (values_.minCoeff() < 0.0)
      throw ParameterError("SimilarityMatrix: negative entry");
    values_ = ((values_ + values_.transpose()) / 2.0).eval();
  }

  Index size() const { return values_.rows(); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

/// Binary symmetric reachability matrix of a TKNN graph: entry (i,j) is 1
/// iff i and j lie in the same connected component; the diagonal is all 1.
class ReachabilityMatrix {
 public:
  explicit ReachabilityMatrix(Matrix values) : values_(std::move(values)) {
    detail::require_square(values_, "ReachabilityMatrix");
    const Index n = values_.rows();
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const double v = values_(i, j);
        if (v != 0.0 && v != 1.0)
          throw ParameterError("ReachabilityMatrix: entries must be 0 or 1");
        if (values_(j, i) != v)
          throw ParameterError("ReachabilityMatrix: not symmetric");
      }
    for (Index i = 0; i < n; ++i)
      if (values_(i, i) != 1.0)
        throw ParameterError("ReachabilityMatrix: diagonal must be 1");
    check_transitive_closure();
  }

  Index size() const { return values_.rows(); }
  const Matrix& values() const { return values_; }

  /// Column i as a dense vector (the regularization target w_i).
  Vector column(Index i) const { return values_.col(i); }

 private:
  // Transitive closure holds iff the 1-entries coincide with the connected
  // components of the graph they induce.
  void check_transitive_closure() const {
    const Index n = values_.rows();
    std::vector<Index> parent(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    std::function<Index(Index)> find = [&](Index a) {
      while (parent[static_cast<std::size_t>(a)] != a) {
        parent[static_cast<std::size_t>(a)] =
            parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
        a = parent[static_cast<std::size_t>(a)];
      }
      return a;
    };
    for (Index j = 0; j < n; ++j)
      for (Index i = j + 1; i < n; ++i)
        if (values_(i, j) == 1.0) {
          const Index ra = find(i), rb = find(j);
          if (ra != rb) parent[static_cast<std::size_t>(ra)] = rb;
        }
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const bool same = find(i) == find(j);
        if ((values_(i, j) == 1.0) != same)
          throw ParameterError("ReachabilityMatrix: not transitively closed");
      }
  }

  Matrix values_;
};

/// p x n matrix of pseudo-eigenvector features; every column has unit
/// Euclidean norm (within 1e-10).
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Matrix values) : values_(std::move(values)) {
    for (Index q = 0; q < values_.cols(); ++q) {
      const double nrm = values_.col(q).norm();
      if (std::abs(nrm - 1.0) > 1e-10)
        throw ParameterError("FeatureMatrix: column " + std::to_string(q) +
                             " has norm " + std::to_string(nrm) + ", expected 1");
    }
  }

  Index p() const { return values_.rows(); }
  Index n() const { return values_.cols(); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

/// Inexact-ALM knobs shared by the sparse and trace-Lasso solvers.
struct SolverConfig {
  double alpha1 = 0.1;    ///< weight of the sparsity / trace-Lasso term, > 0
  double alpha2 = 0.1;    ///< weight of the reachability term, >= 0
  double rho = 1.1;       ///< penalty growth factor, > 1
  double mu0 = 0.1;       ///< initial penalty
  double mu_max = 1e10;   ///< penalty cap
  double epsilon = 1e-6;  ///< residual tolerance
  int max_iters = 1000;

  void validate() const {
    if (!(alpha1 > 0.0)) throw ParameterError("SolverConfig: alpha1 must be > 0");
    if (!(alpha2 >= 0.0)) throw ParameterError("SolverConfig: alpha2 must be >= 0");
    if (!(rho > 1.0)) throw ParameterError("SolverConfig: rho must be > 1");
    if (!(mu0 > 0.0)) throw ParameterError("SolverConfig: mu0 must be > 0");
    if (!(mu0 <= mu_max)) throw ParameterError("SolverConfig: mu0 must be <= mu_max");
    if (!(epsilon > 0.0)) throw ParameterError("SolverConfig: epsilon must be > 0");
    if (max_iters < 1) throw ParameterError("SolverConfig: max_iters must be >= 1");
  }
};

/// A cluster assignment plus the metadata needed to reproduce it.
struct Clustering {
  std::vector<int> labels;  ///< length n, ids in [0, k)
  int k = 0;
  std::string method;
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Symmetric nonnegative correlation matrix (|Z| + |Z^T|) / 2.
inline Matrix symmetrize_abs(const Matrix& Z) {
  detail::require_square(Z, "symmetrize_abs");
  return (Z.cwiseAbs() + Z.transpose().cwiseAbs()) / 2.0;
}

/// Renames cluster ids so they appear in order of first occurrence.
/// Makes label sequences from independent k-means runs comparable.
inline std::vector<int> relabel_canonical(const std::vector<int>& labels) {
  if (labels.empty()) throw ParameterError("relabel_canonical: empty label sequence");
  std::unordered_map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int label : labels) {
    auto [it, inserted] = remap.emplace(label, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  return out;
}

}  // namespace cast
