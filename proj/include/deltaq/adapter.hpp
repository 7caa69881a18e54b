// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deltaq/quantizer.hpp"
#include "deltaq/tensor_core.hpp"

namespace deltaq {

enum class Flavor : std::uint8_t { Plain = 0, Sine = 1 };

const char* to_string(Flavor flavor);
Flavor parse_flavor(const std::string& text);

inline constexpr double kDefaultOmega = 200.0;

/// gamma = multiplier * sqrt(n).
inline double default_gamma(std::int64_t n, double multiplier = 1.0) {
  if (n < 1) throw InvalidInput("default_gamma: n must be >= 1");
  if (!(multiplier > 0.0)) throw InvalidInput("default_gamma: multiplier must be positive");
  return multiplier * std::sqrt(static_cast<double>(n));
}

/// Low-rank factors A (m x k) and B (k x n) with the sine parameters.
///
/// gamma is derived from the output column count n unless `gamma_override`
/// is set.
template <typename Scalar>
struct AdapterPair {
  MatrixX<Scalar> a;
  MatrixX<Scalar> b;
  Flavor flavor = Flavor::Sine;
  Scalar omega = Scalar(kDefaultOmega);
  Scalar gamma_multiplier = Scalar(1);
  std::optional<Scalar> gamma_override;

  Eigen::Index rank() const { return a.cols(); }

  Scalar gamma() const {
    if (gamma_override) return *gamma_override;
    return Scalar(default_gamma(b.cols(), static_cast<double>(gamma_multiplier)));
  }

  void validate() const {
    if (a.cols() != b.rows()) {
      throw InvalidInput("adapter: A.cols (" + std::to_string(a.cols()) + ") != B.rows (" +
                         std::to_string(b.rows()) + ")");
    }
    if (a.size() == 0 || b.size() == 0) throw InvalidInput("adapter: empty factor");
    if (a.cols() > std::min(a.rows(), b.cols())) {
      throw InvalidInput("adapter: rank exceeds min(m, n)");
    }
    if (!(gamma() > Scalar(0))) throw InvalidInput("adapter: gamma must be positive");
    if (flavor == Flavor::Sine && !(omega > Scalar(0))) {
      throw InvalidInput("adapter: omega must be positive for the sine flavor");
    }
  }
};

/// Applies the adapter activation to a precomputed product P = A * B:
/// Plain -> P, Sine -> sin(omega * P) / gamma.
template <typename Derived>
MatrixX<typename Derived::Scalar> activate(const Eigen::MatrixBase<Derived>& product, Flavor flavor,
                                           typename Derived::Scalar omega,
                                           typename Derived::Scalar gamma) {
  if (flavor == Flavor::Plain) return product;
  return ((omega * product.array()).sin() / gamma).matrix();
}

template <typename Scalar>
MatrixX<Scalar> reconstruct_delta(const AdapterPair<Scalar>& pair) {
  pair.validate();
  return activate(matmul(pair.a, pair.b), pair.flavor, pair.omega, pair.gamma());
}

/// Same as reconstruct_delta on the dequantized factors.
Matrix reconstruct_quantized_delta(const QuantizedTensor& qa, const QuantizedTensor& qb,
                                   double omega, double gamma, Flavor flavor);

/// Named collection of adapter pairs plus the defaults used to build them.
struct AdapterSet {
  std::map<std::string, AdapterPair<double>> layers;
  double default_omega = kDefaultOmega;
  double gamma_multiplier = 1.0;
};

/// Shape and codebook size of one stored tensor, enough to size its record.
struct TensorLayout {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::size_t codebook_size = 0;

  std::uint64_t element_count() const;
};

/// Precision of a footprint estimate: k-means codebook quantization at
/// `bits`, or uncompressed 16-bit storage.
struct Precision {
  int bits = 16;
  bool full = false;

  static Precision quantized(int b) { return {b, false}; }
  static Precision full_precision() { return {16, true}; }
};

/// Bytes needed to store the tensors.
///
/// Quantized: exactly the size of the compressed container holding them
/// (packed indices, 32-bit codebooks, record and file headers, checksum).
/// Full: two bytes per parameter, nothing else.
std::uint64_t memory_footprint(std::span<const TensorLayout> tensors, Precision precision);

/// Footprint of an adapter set. Codebook sizes are predicted as
/// min(2^bits, distinct values) per tensor, which is what quantize_matrix
/// produces; tensors are named "<layer>.A" and "<layer>.B".
std::uint64_t memory_footprint(const AdapterSet& set, Precision precision);

inline double to_mebibytes(std::uint64_t bytes) {
  return static_cast<double>(bytes) / (1024.0 * 1024.0);
}

}  // namespace deltaq
