#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cast/core.hpp"
#include "cast/similarity.hpp"

namespace cast {

/// Points with gold-standard cluster labels.
struct LabeledPoints {
  PointSet points;
  std::vector<int> truth;
  std::string name;
};

enum class ClusterShape { Rectangle, Disk, HalfRing };

/// One synthetic cluster. Extent semantics by shape:
///   Rectangle - (ex, ey) are half-widths around the center
///   Disk      - ex is the radius (ey unused)
///   HalfRing  - ex is the mean radius, ey the radial band half-width;
///               the arc starts at angle pi (a "smile") and spans
///               pi * (1 + delta_s)
struct ClusterSpec {
  ClusterShape shape = ClusterShape::Rectangle;
  double cx = 0.0, cy = 0.0;
  double ex = 1.0, ey = 1.0;
  int count = 1;
};

/// Synthetic multi-scale dataset description. delta_d scales the target
/// cluster's point count at fixed extent (a density change); delta_s scales
/// its region and point count together (a size change at fixed density).
struct SynParams {
  std::vector<ClusterSpec> clusters;
  double delta_d = 0.0;
  double delta_s = 0.0;
  std::size_t target = 0;  ///< cluster index the deltas apply to
  std::uint64_t seed = 0;

  void validate() const {
    if (clusters.empty()) throw ParameterError("SynParams: no clusters");
    if (target >= clusters.size()) throw ParameterError("SynParams: target index out of range");
    if (!(delta_d >= -0.99)) throw ParameterError("SynParams: delta_d must be >= -0.99");
    if (!(delta_s >= -0.99)) throw ParameterError("SynParams: delta_s must be >= -0.99");
    for (const auto& c : clusters) {
      if (c.count < 1) throw ParameterError("SynParams: cluster count must be >= 1");
      if (!(c.ex > 0.0) || !(c.ey > 0.0))
        throw ParameterError("SynParams: extents must be positive");
    }
  }

  /// A sparse elongated strip sandwiched between a small dense disk (above)
  /// and a denser rectangle (below).
  static SynParams syn1() {
    SynParams p;
    p.clusters = {
        {ClusterShape::Rectangle, 0.0, 0.0, 12.5, 1.0, 500},   // sparse strip
        {ClusterShape::Disk, -5.0, 2.6, 0.8, 0.8, 80},         // small dense disk
        {ClusterShape::Rectangle, 5.0, -2.7, 2.5, 0.5, 120},   // dense rectangle
    };
    p.target = 0;
    return p;
  }

  /// Two dense squares close to a sparse half-ring; delta_s grows the ring
  /// from a half ring to a whole ring.
  static SynParams syn2() {
    SynParams p;
    p.clusters = {
        {ClusterShape::Rectangle, -2.4, 0.5, 0.7, 0.7, 150},
        {ClusterShape::Rectangle, 2.4, 0.5, 0.7, 0.7, 150},
        {ClusterShape::HalfRing, 0.0, 0.0, 4.0, 0.3, 120},
    };
    p.target = 2;
    return p;
  }
};

namespace detail {

inline void sample_cluster(const ClusterSpec& spec, double span_scale, int count, Rng& rng,
                           Matrix& coords, Index row0) {
  for (int i = 0; i < count; ++i) {
    double x = 0.0, y = 0.0;
    switch (spec.shape) {
      case ClusterShape::Rectangle: {
        x = spec.cx + spec.ex * span_scale * (2.0 * rng.next_double() - 1.0);
        y = spec.cy + spec.ey * (2.0 * rng.next_double() - 1.0);
        break;
      }
      case ClusterShape::Disk: {
        const double r = spec.ex * std::sqrt(span_scale) * std::sqrt(rng.next_double());
        const double theta = 2.0 * std::numbers::pi * rng.next_double();
        x = spec.cx + r * std::cos(theta);
        y = spec.cy + r * std::sin(theta);
        break;
      }
      case ClusterShape::HalfRing: {
        const double span = std::numbers::pi * span_scale;
        const double theta = std::numbers::pi + span * rng.next_double();
        const double r = rng.next_double(spec.ex - spec.ey, spec.ex + spec.ey);
        x = spec.cx + r * std::cos(theta);
        y = spec.cy + r * std::sin(theta);
        break;
      }
    }
    coords(row0 + i, 0) = x;
    coords(row0 + i, 1) = y;
  }
}

inline LabeledPoints generate_synthetic(const SynParams& params, std::string name) {
  params.validate();
  const double size_scale = 1.0 + params.delta_s;
  const double density_scale = 1.0 + params.delta_d;

  std::vector<int> counts;
  std::vector<double> spans;
  for (std::size_t c = 0; c < params.clusters.size(); ++c) {
    double mult = 1.0, span = 1.0;
    if (c == params.target) {
      mult = density_scale * size_scale;  // density change x proportional size growth
      span = size_scale;
    }
    counts.push_back(std::max(1, static_cast<int>(
        std::llround(params.clusters[c].count * mult))));
    spans.push_back(span);
  }

  Index total = 0;
  for (int c : counts) total += c;
  Matrix coords(total, 2);
  std::vector<int> truth(static_cast<std::size_t>(total));
  Index row = 0;
  for (std::size_t c = 0; c < params.clusters.size(); ++c) {
    Rng rng(derive_seed(params.seed, c));
    sample_cluster(params.clusters[c], spans[c], counts[c], rng, coords, row);
    for (int i = 0; i < counts[c]; ++i) truth[static_cast<std::size_t>(row + i)] = static_cast<int>(c);
    row += counts[c];
  }
  return LabeledPoints{PointSet(std::move(coords)), std::move(truth), std::move(name)};
}

}  // namespace detail

/// Syn1: sparse strip between a dense disk and a dense rectangle.
inline LabeledPoints gen_syn1(const SynParams& params = SynParams::syn1()) {
  return detail::generate_synthetic(params, "syn1");
}

/// Syn2: two dense squares close to a sparse half-ring.
inline LabeledPoints gen_syn2(const SynParams& params = SynParams::syn2()) {
  return detail::generate_synthetic(params, "syn2");
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

enum class LabelColumn { Last, None };

namespace detail {

inline bool parse_double(const std::string& cell, double& out) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
  if (first == last) return false;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

}  // namespace detail

/// Loads a rectangular numeric CSV. A non-numeric first row is treated as a
/// header and skipped. With LabelColumn::Last the final column holds integer
/// gold labels, remapped to 0..k-1 in order of first occurrence.
inline LabeledPoints load_csv(const std::string& path, LabelColumn label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("load_csv: cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::vector<double> raw_labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t ncols = 0;
  bool header_allowed = true;  // at most one non-numeric row, and only first
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    std::vector<double> vals(cells.size());
    bool ok = true;
    std::size_t bad_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (!detail::parse_double(cells[c], vals[c])) {
        ok = false;
        bad_col = c;
        break;
      }
    if (!ok) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw ParseError("load_csv: non-numeric cell at row " + std::to_string(line_no) +
                       ", col " + std::to_string(bad_col + 1));
    }
    header_allowed = false;
    if (rows.empty()) {
      ncols = vals.size();
      const std::size_t min_cols = label_column == LabelColumn::Last ? 2 : 1;
      if (ncols < min_cols)
        throw ParseError("load_csv: too few columns at row " + std::to_string(line_no));
    } else if (vals.size() != ncols) {
      throw ParseError("load_csv: ragged row " + std::to_string(line_no) + " (expected " +
                       std::to_string(ncols) + " cells, got " + std::to_string(vals.size()) +
                       ")");
    }
    if (label_column == LabelColumn::Last) {
      const double lv = vals.back();
      if (std::abs(lv - std::llround(lv)) > 1e-9)
        throw ParseError("load_csv: non-integer label at row " + std::to_string(line_no));
      raw_labels.push_back(lv);
      vals.pop_back();
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw ParseError("load_csv: no data rows in " + path);

  Matrix coords(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      coords(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];

  std::vector<int> truth;
  if (label_column == LabelColumn::Last) {
    std::vector<int> ints(raw_labels.size());
    for (std::size_t i = 0; i < raw_labels.size(); ++i)
      ints[i] = static_cast<int>(std::llround(raw_labels[i]));
    truth = relabel_canonical(ints);
  }
  return LabeledPoints{PointSet(std::move(coords)), std::move(truth), path};
}

/// Writes points (and labels, when present) as CSV with round-trip-exact
/// formatting. Deterministic bytes.
inline void save_csv(const LabeledPoints& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_csv: cannot open " + path + " for writing");
  const Matrix& c = data.points.coords();
  const bool labeled = !data.truth.empty();
  char buf[40];
  for (Index i = 0; i < c.rows(); ++i) {
    for (Index j = 0; j < c.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", c(i, j));
      out << buf << (j + 1 < c.cols() || labeled ? "," : "");
    }
    if (labeled) out << data.truth[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) throw IoError("save_csv: write failed for " + path);
}

// ---------------------------------------------------------------------------
// Matrix brightness dumps (binary graymap)
// ---------------------------------------------------------------------------

/// Writes M as an 8-bit P5 graymap with rows and columns permuted so that
/// objects are grouped by cluster id ascending (stable within a cluster)
/// and values min-max scaled to 0-255. A constant matrix maps to all-zero
/// pixels.
inline void dump_matrix_image(const Matrix& M, const std::vector<int>& order,
                              const std::string& path) {
  detail::require_square(M, "dump_matrix_image");
  const Index n = M.rows();
  if (static_cast<Index>(order.size()) != n)
    throw DimensionError("dump_matrix_image: order length does not match matrix size");

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::stable_sort(perm.begin(), perm.end(), [&](Index a, Index b) {
    return order[static_cast<std::size_t>(a)] < order[static_cast<std::size_t>(b)];
  });

  const double lo = M.minCoeff();
  const double hi = M.maxCoeff();
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("dump_matrix_image: cannot open " + path + " for writing");
  out << "P5\n" << n << " " << n << "\n255\n";
  std::vector<unsigned char> rowbuf(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      const double v = M(perm[static_cast<std::size_t>(r)], perm[static_cast<std::size_t>(c)]);
      rowbuf[static_cast<std::size_t>(c)] =
          static_cast<unsigned char>(std::llround((v - lo) * scale));
    }
    out.write(reinterpret_cast<const char*>(rowbuf.data()), static_cast<std::streamsize>(n));
  }
  if (!out) throw IoError("dump_matrix_image: write failed for " + path);
}

}  // namespace cast
