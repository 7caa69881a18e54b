// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Exhaustive reference for 1D k-means: tries every split of the sorted data
// into at most k contiguous groups.

#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

namespace deltaq::oracle {

// Center and cost conventions mirror the library: ascending sum over count,
// clamped to the group range; residuals summed in ascending order
// with extended accumulation.
inline double partition_cost(const std::vector<double>& sorted, const std::vector<std::size_t>& cuts) {
  long double total = 0.0L;
  std::size_t begin = 0;
  for (std::size_t g = 0; g <= cuts.size(); ++g) {
    const std::size_t end = g < cuts.size() ? cuts[g] : sorted.size();
    double sum = 0.0;
    for (std::size_t p = begin; p < end; ++p) sum += sorted[p];
    const double center =
        std::clamp(sum / static_cast<double>(end - begin), sorted[begin], sorted[end - 1]);
    for (std::size_t p = begin; p < end; ++p) {
      const long double r = static_cast<long double>(sorted[p]) - static_cast<long double>(center);
      total += r * r;
    }
    begin = end;
  }
  return static_cast<double>(total);
}

namespace detail {
inline void enumerate(const std::vector<double>& sorted, std::size_t groups_left, std::size_t start,
                      std::vector<std::size_t>& cuts, double& best) {
  best = std::min(best, partition_cost(sorted, cuts));
  if (groups_left == 0) return;
  for (std::size_t c = start; c < sorted.size(); ++c) {
    cuts.push_back(c);
    enumerate(sorted, groups_left - 1, c + 1, cuts, best);
    cuts.pop_back();
  }
}
}  // namespace detail

inline double kmeans_cost(std::span<const double> values, int k) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> cuts;
  double best = std::numeric_limits<double>::infinity();
  detail::enumerate(sorted, static_cast<std::size_t>(k - 1), 1, cuts, best);
  return best;
}

// Unpruned O(k n^2) dynamic program, for sizes beyond the exhaustive search.
// Returns the optimal cost computed with plain long double sums.
inline double kmeans_cost_quadratic(std::span<const double> values, std::size_t k) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::vector<long double> s(n + 1, 0.0L), s2(n + 1, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    s[i + 1] = s[i] + sorted[i];
    s2[i + 1] = s2[i] + static_cast<long double>(sorted[i]) * sorted[i];
  }
  auto seg = [&](std::size_t b, std::size_t e) {  // [b, e)
    const long double sum = s[e] - s[b];
    return std::max(0.0L, s2[e] - s2[b] - sum * sum / static_cast<long double>(e - b));
  };
  const long double inf = std::numeric_limits<long double>::infinity();
  std::vector<long double> prev(n + 1, inf), cur(n + 1, inf);
  for (std::size_t e = 1; e <= n; ++e) prev[e] = seg(0, e);
  for (std::size_t g = 2; g <= k; ++g) {
    std::fill(cur.begin(), cur.end(), inf);
    for (std::size_t e = 1; e <= n; ++e) {
      cur[e] = prev[e];
      for (std::size_t b = 1; b < e; ++b) cur[e] = std::min(cur[e], prev[b] + seg(b, e));
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[n]);
}

}  // namespace deltaq::oracle
