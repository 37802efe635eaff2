#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cast/core.hpp"

namespace cast {

/// Contingency table between a gold-standard partition (rows) and a
/// predicted partition (columns); the shared substrate of all three
/// clustering measures.
struct ContingencyTable {
  std::vector<std::vector<std::int64_t>> counts;  ///< r x c
  std::vector<std::int64_t> row_sums;
  std::vector<std::int64_t> col_sums;
  std::int64_t n = 0;

  static ContingencyTable from_labels(const std::vector<int>& truth,
                                      const std::vector<int>& pred) {
    if (truth.size() != pred.size())
      throw ParameterError("ContingencyTable: label sequences differ in length");
    if (truth.empty()) throw ParameterError("ContingencyTable: empty label sequences");
    const std::vector<int> t = relabel_canonical(truth);
    const std::vector<int> p = relabel_canonical(pred);
    const int r = *std::max_element(t.begin(), t.end()) + 1;
    const int c = *std::max_element(p.begin(), p.end()) + 1;
    ContingencyTable table;
    table.counts.assign(static_cast<std::size_t>(r),
                        std::vector<std::int64_t>(static_cast<std::size_t>(c), 0));
    for (std::size_t i = 0; i < t.size(); ++i)
      ++table.counts[static_cast<std::size_t>(t[i])][static_cast<std::size_t>(p[i])];
    table.row_sums.assign(static_cast<std::size_t>(r), 0);
    table.col_sums.assign(static_cast<std::size_t>(c), 0);
    for (std::size_t i = 0; i < table.counts.size(); ++i)
      for (std::size_t j = 0; j < table.counts[i].size(); ++j) {
        table.row_sums[i] += table.counts[i][j];
        table.col_sums[j] += table.counts[i][j];
      }
    table.n = static_cast<std::int64_t>(t.size());
    return table;
  }
};

/// Fraction of objects that fall in the majority gold cluster of their
/// predicted cluster: (1/n) sum_j max_i |C_i ^ Chat_j|. Not symmetric.
inline double purity(const std::vector<int>& truth, const std::vector<int>& pred) {
  const ContingencyTable t = ContingencyTable::from_labels(truth, pred);
  std::int64_t hit = 0;
  for (std::size_t j = 0; j < t.col_sums.size(); ++j) {
    std::int64_t best = 0;
    for (std::size_t i = 0; i < t.counts.size(); ++i) best = std::max(best, t.counts[i][j]);
    hit += best;
  }
  return static_cast<double>(hit) / static_cast<double>(t.n);
}

/// Pair-agreement fraction (N00 + N11) / C(n,2): pairs either grouped
/// together in both partitions or separated in both.
inline double rand_index(const std::vector<int>& truth, const std::vector<int>& pred) {
  const ContingencyTable t = ContingencyTable::from_labels(truth, pred);
  if (t.n < 2) throw ParameterError("rand_index: need at least two objects");
  auto pairs = [](std::int64_t v) { return v * (v - 1) / 2; };
  std::int64_t same_both = 0;
  for (const auto& row : t.counts)
    for (std::int64_t v : row) same_both += pairs(v);
  std::int64_t same_truth = 0, same_pred = 0;
  for (std::int64_t v : t.row_sums) same_truth += pairs(v);
  for (std::int64_t v : t.col_sums) same_pred += pairs(v);
  const std::int64_t total = pairs(t.n);
  const std::int64_t diff_both = total - same_truth - same_pred + same_both;
  return static_cast<double>(same_both + diff_both) / static_cast<double>(total);
}

namespace detail {

inline double entropy(const std::vector<std::int64_t>& sums, std::int64_t n) {
  double h = 0.0;
  for (std::int64_t v : sums)
    if (v > 0) {
      const double f = static_cast<double>(v) / static_cast<double>(n);
      h -= f * std::log(f);
    }
  return h;
}

inline double mutual_information(const ContingencyTable& t) {
  double mi = 0.0;
  const double n = static_cast<double>(t.n);
  for (std::size_t i = 0; i < t.counts.size(); ++i)
    for (std::size_t j = 0; j < t.counts[i].size(); ++j) {
      const std::int64_t v = t.counts[i][j];
      if (v > 0)
        mi += (static_cast<double>(v) / n) *
              std::log(n * static_cast<double>(v) /
                       (static_cast<double>(t.row_sums[i]) *
                        static_cast<double>(t.col_sums[j])));
    }
  return mi;
}

/// Expected mutual information under the permutation (hypergeometric)
/// model with the table's margins fixed.
inline double expected_mutual_information(const ContingencyTable& t) {
  const std::int64_t n = t.n;
  const double nd = static_cast<double>(n);
  double emi = 0.0;
  for (std::int64_t a : t.row_sums)
    for (std::int64_t b : t.col_sums) {
      const std::int64_t lo = std::max<std::int64_t>(1, a + b - n);
      const std::int64_t hi = std::min(a, b);
      for (std::int64_t nij = lo; nij <= hi; ++nij) {
        const double log_p = std::lgamma(static_cast<double>(a + 1)) +
                             std::lgamma(static_cast<double>(b + 1)) +
                             std::lgamma(static_cast<double>(n - a + 1)) +
                             std::lgamma(static_cast<double>(n - b + 1)) -
                             std::lgamma(static_cast<double>(n + 1)) -
                             std::lgamma(static_cast<double>(nij + 1)) -
                             std::lgamma(static_cast<double>(a - nij + 1)) -
                             std::lgamma(static_cast<double>(b - nij + 1)) -
                             std::lgamma(static_cast<double>(n - a - b + nij + 1));
        emi += (static_cast<double>(nij) / nd) *
               std::log(nd * static_cast<double>(nij) /
                        (static_cast<double>(a) * static_cast<double>(b))) *
               std::exp(log_p);
      }
    }
  return emi;
}

}  // namespace detail

/// Adjusted mutual information, AMI_max normalization:
/// (MI - E[MI]) / (max(H(truth), H(pred)) - E[MI]). Entropies use natural
/// logs; the measure is scale-free so the base does not matter. Two
/// single-cluster partitions give 1.0 by convention.
inline double ami(const std::vector<int>& truth, const std::vector<int>& pred) {
  const ContingencyTable t = ContingencyTable::from_labels(truth, pred);
  const double mi = detail::mutual_information(t);
  const double emi = detail::expected_mutual_information(t);
  const double h = std::max(detail::entropy(t.row_sums, t.n),
                            detail::entropy(t.col_sums, t.n));
  const double denom = h - emi;
  if (std::abs(denom) < 1e-12) return 1.0;
  return (mi - emi) / denom;
}

}  // namespace cast
