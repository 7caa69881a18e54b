// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "deltaq/tensor_core.hpp"

namespace deltaq {

/// Result of an exact 1D k-means run.
struct KMeansResult {
  std::vector<double> centers;             // strictly ascending
  std::vector<std::uint32_t> assignments;  // one per input, nearest center, ties low
  double cost = 0.0;                       // within-cluster sum of squared deviations
};

/// Globally optimal k-clustering of 1D data.
///
/// Optimal clusters are contiguous runs of the sorted values, so the problem
/// is a dynamic program over split points; the split matrix is totally
/// monotone, so each layer is filled in O(n) with SMAWK. When the input has
/// fewer than k distinct values the result has exactly one center per
/// distinct value. Throws InvalidInput when the backtracking table would
/// exceed 2^28 entries (about 1 GiB).
KMeansResult kmeans_1d(std::span<const double> values, int k);

/// Sorted lookup table of representative values.
struct Codebook {
  std::vector<float> centers;
  int bits = 1;

  std::size_t size() const { return centers.size(); }
  bool operator==(const Codebook&) const = default;
};

struct QuantizedTensor {
  std::vector<std::uint32_t> shape;
  Codebook codebook;
  std::vector<std::uint32_t> indices;

  std::size_t element_count() const;
  bool operator==(const QuantizedTensor&) const = default;
};

/// Throws InvalidInput unless the codebook is strictly ascending, finite and
/// holds at most 2^bits centers.
void validate(const Codebook& codebook);

/// Quantizes every entry of `m` with an optimal 2^bits-level codebook.
/// Centers are stored as 32-bit floats.
QuantizedTensor quantize_matrix(const Matrix& m, int bits);

/// Codebook lookup per index, reshaped to the stored 2D shape.
/// Throws CorruptData on an out-of-range index.
Matrix dequantize(const QuantizedTensor& q);

/// dequantize(q) - m, elementwise.
Matrix quantization_error(const Matrix& m, const QuantizedTensor& q);

}  // namespace deltaq
