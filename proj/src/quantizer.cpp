// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#include "deltaq/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace deltaq {
namespace {

// Backtracking table cap: 2^28 split entries (1 GiB).
constexpr std::size_t kMaxSplitEntries = std::size_t{1} << 28;

// Weighted prefix sums over the sorted distinct values, centered on the data
// mean so that sum-of-squares differences do not cancel catastrophically.
class SegmentCost {
 public:
  SegmentCost(const std::vector<double>& xs, const std::vector<std::size_t>& counts, double offset)
      : w_(xs.size() + 1, 0.0), s_(xs.size() + 1, 0.0), s2_(xs.size() + 1, 0.0) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double c = static_cast<double>(counts[i]);
      const double x = xs[i] - offset;
      w_[i + 1] = w_[i] + c;
      s_[i + 1] = s_[i] + c * x;
      s2_[i + 1] = s2_[i] + c * x * x;
    }
  }

  // Cost of one cluster spanning distinct values [first, last].
  double operator()(std::size_t first, std::size_t last) const {
    const double w = w_[last + 1] - w_[first];
    const double s = s_[last + 1] - s_[first];
    const double s2 = s2_[last + 1] - s2_[first];
    return std::max(0.0, s2 - s * s / w);
  }

 private:
  std::vector<double> w_, s_, s2_;
};

// Fills cur[lo..hi] for one DP layer by monotone divide and conquer. The
// optimal split is non-decreasing in i, and never left of the previous
// layer's split for the same i, which prunes most of each search window.
void fill_layer(const SegmentCost& cost, const std::vector<double>& prev, std::vector<double>& cur,
                std::uint32_t* split, const std::uint32_t* prev_split, std::size_t lo,
                std::size_t hi, std::size_t opt_lo, std::size_t opt_hi) {
  while (lo <= hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    std::size_t j = opt_lo;
    if (prev_split) j = std::max<std::size_t>(j, prev_split[mid]);
    const std::size_t j_end = std::min(mid, opt_hi);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = j;
    for (; j <= j_end; ++j) {
      const double v = prev[j - 1] + cost(j, mid);
      if (v < best) {
        best = v;
        best_j = j;
      }
    }
    cur[mid] = best;
    split[mid] = static_cast<std::uint32_t>(best_j);
    if (mid > lo) fill_layer(cost, prev, cur, split, prev_split, lo, mid - 1, opt_lo, best_j);
    // Tail call on the right half.
    lo = mid + 1;
    opt_lo = best_j;
  }
}

std::uint32_t nearest_center(const std::vector<double>& centers, double x) {
  const auto it = std::lower_bound(centers.begin(), centers.end(), x);
  if (it == centers.begin()) return 0;
  if (it == centers.end()) return static_cast<std::uint32_t>(centers.size() - 1);
  const auto hi = static_cast<std::uint32_t>(it - centers.begin());
  const double d_lo = x - centers[hi - 1];
  const double d_hi = *it - x;
  return d_lo <= d_hi ? hi - 1 : hi;
}

}  // namespace

KMeansResult kmeans_1d(std::span<const double> values, int k) {
  if (values.empty()) throw InvalidInput("kmeans_1d: empty input");
  if (k <= 0) throw InvalidInput("kmeans_1d: k must be positive, got " + std::to_string(k));
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidInput("kmeans_1d: non-finite value");
  }

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> xs;
  std::vector<std::size_t> counts;
  for (double v : sorted) {
    if (xs.empty() || v != xs.back()) {
      xs.push_back(v);
      counts.push_back(1);
    } else {
      ++counts.back();
    }
  }
  const std::size_t d = xs.size();
  const std::size_t clusters = std::min<std::size_t>(static_cast<std::size_t>(k), d);

  // first[c] = index of the first distinct value in cluster c.
  std::vector<std::size_t> first(clusters + 1, d);
  if (clusters == d) {
    std::iota(first.begin(), first.begin() + static_cast<std::ptrdiff_t>(d), std::size_t{0});
  } else {
    const double offset = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                          static_cast<double>(sorted.size());
    const SegmentCost cost(xs, counts, offset);
    std::vector<double> prev(d), cur(d);
    for (std::size_t i = 0; i < d; ++i) prev[i] = cost(0, i);
    if ((clusters - 1) * d > kMaxSplitEntries) {
      throw InvalidInput("kmeans_1d: " + std::to_string(d) + " distinct values with k=" +
                         std::to_string(clusters) + " exceeds the exact solver's table limit");
    }
    std::vector<std::uint32_t> split((clusters - 1) * d, 0);
    for (std::size_t layer = 1; layer < clusters; ++layer) {
      std::fill(cur.begin(), cur.end(), std::numeric_limits<double>::infinity());
      std::uint32_t* row = split.data() + (layer - 1) * d;
      const std::uint32_t* prev_row = layer > 1 ? row - d : nullptr;
      fill_layer(cost, prev, cur, row, prev_row, layer, d - 1, layer, d - 1);
      std::swap(prev, cur);
    }
    first[0] = 0;
    std::size_t end = d - 1;
    for (std::size_t layer = clusters - 1; layer >= 1; --layer) {
      const std::size_t j = split[(layer - 1) * d + end];
      first[layer] = j;
      end = j - 1;
    }
  }

  KMeansResult result;
  result.centers.resize(clusters);
  std::vector<std::uint32_t> sorted_cluster(sorted.size());
  std::size_t pos = 0;
  for (std::size_t c = 0; c < clusters; ++c) {
    const std::size_t begin_pos = pos;
    for (std::size_t i = first[c]; i < first[c + 1]; ++i) pos += counts[i];
    std::fill(sorted_cluster.begin() + static_cast<std::ptrdiff_t>(begin_pos),
              sorted_cluster.begin() + static_cast<std::ptrdiff_t>(pos),
              static_cast<std::uint32_t>(c));
    if (first[c + 1] - first[c] == 1) {
      result.centers[c] = xs[first[c]];
    } else {
      double sum = 0.0;
      for (std::size_t p = begin_pos; p < pos; ++p) sum += sorted[p];
      const double mean = sum / static_cast<double>(pos - begin_pos);
      result.centers[c] = std::clamp(mean, sorted[begin_pos], sorted[pos - 1]);
    }
  }

  // Extended accumulation so partitions with equal true cost round to the
  // same double.
  long double total = 0.0L;
  for (std::size_t p = 0; p < sorted.size(); ++p) {
    const long double r = static_cast<long double>(sorted[p]) -
                          static_cast<long double>(result.centers[sorted_cluster[p]]);
    total += r * r;
  }
  result.cost = static_cast<double>(total);

  result.assignments.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    result.assignments[i] = nearest_center(result.centers, values[i]);
  }
  return result;
}

std::size_t QuantizedTensor::element_count() const {
  std::size_t n = 1;
  for (auto dim : shape) n *= dim;
  return shape.empty() ? 0 : n;
}

void validate(const Codebook& codebook) {
  if (codebook.bits < 1 || codebook.bits > 16) {
    throw InvalidInput("codebook: bits must be in [1, 16], got " + std::to_string(codebook.bits));
  }
  if (codebook.centers.empty()) throw InvalidInput("codebook: no centers");
  if (codebook.centers.size() > (std::size_t{1} << codebook.bits)) {
    throw InvalidInput("codebook: " + std::to_string(codebook.centers.size()) +
                       " centers exceed 2^" + std::to_string(codebook.bits));
  }
  for (std::size_t i = 0; i < codebook.centers.size(); ++i) {
    if (!std::isfinite(codebook.centers[i])) throw InvalidInput("codebook: non-finite center");
    if (i > 0 && !(codebook.centers[i - 1] < codebook.centers[i])) {
      throw InvalidInput("codebook: centers not strictly ascending");
    }
  }
}

QuantizedTensor quantize_matrix(const Matrix& m, int bits) {
  if (bits < 1 || bits > 16) {
    throw InvalidInput("quantize_matrix: bits must be in [1, 16], got " + std::to_string(bits));
  }
  require_finite(m);
  const std::span<const double> flat(m.data(), static_cast<std::size_t>(m.size()));
  KMeansResult km = kmeans_1d(flat, 1 << bits);

  // Narrow to 32-bit storage; merge centers that collide after rounding.
  QuantizedTensor q;
  q.shape = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
  q.codebook.bits = bits;
  std::vector<std::uint32_t> remap(km.centers.size());
  for (std::size_t c = 0; c < km.centers.size(); ++c) {
    const float f = static_cast<float>(km.centers[c]);
    if (q.codebook.centers.empty() || q.codebook.centers.back() != f) {
      q.codebook.centers.push_back(f);
    }
    remap[c] = static_cast<std::uint32_t>(q.codebook.centers.size() - 1);
  }
  q.indices.resize(km.assignments.size());
  for (std::size_t i = 0; i < km.assignments.size(); ++i) {
    q.indices[i] = remap[km.assignments[i]];
  }
  return q;
}

Matrix dequantize(const QuantizedTensor& q) {
  if (q.shape.empty() || q.shape.size() > 2) {
    throw InvalidInput("dequantize: expected a 1D or 2D shape");
  }
  const Eigen::Index rows = q.shape.size() == 2 ? q.shape[0] : 1;
  const Eigen::Index cols = q.shape.back();
  if (static_cast<std::size_t>(rows * cols) != q.indices.size()) {
    throw CorruptData("dequantize: index count does not match shape");
  }
  Matrix out(rows, cols);
  const std::size_t levels = q.codebook.centers.size();
  for (std::size_t i = 0; i < q.indices.size(); ++i) {
    const std::uint32_t idx = q.indices[i];
    if (idx >= levels) {
      throw CorruptData("dequantize: index " + std::to_string(idx) + " outside codebook of size " +
                        std::to_string(levels));
    }
    out.data()[i] = q.codebook.centers[idx];
  }
  return out;
}

Matrix quantization_error(const Matrix& m, const QuantizedTensor& q) {
  Matrix restored = dequantize(q);
  if (restored.rows() != m.rows() || restored.cols() != m.cols()) {
    throw InvalidInput("quantization_error: shape mismatch");
  }
  return restored - m;
}

}  // namespace deltaq
