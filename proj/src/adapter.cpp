// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#include "deltaq/adapter.hpp"

#include <algorithm>

#include "deltaq/codec.hpp"

namespace deltaq {

const char* to_string(Flavor flavor) {
  return flavor == Flavor::Sine ? "sine" : "plain";
}

Flavor parse_flavor(const std::string& text) {
  if (text == "sine") return Flavor::Sine;
  if (text == "plain") return Flavor::Plain;
  throw InvalidInput("unknown flavor '" + text + "' (expected plain or sine)");
}

Matrix reconstruct_quantized_delta(const QuantizedTensor& qa, const QuantizedTensor& qb,
                                   double omega, double gamma, Flavor flavor) {
  AdapterPair<double> pair;
  pair.a = dequantize(qa);
  pair.b = dequantize(qb);
  pair.flavor = flavor;
  pair.omega = omega;
  pair.gamma_override = gamma;
  return reconstruct_delta(pair);
}

std::uint64_t TensorLayout::element_count() const {
  if (shape.empty()) return 0;
  std::uint64_t n = 1;
  for (auto dim : shape) n *= dim;
  return n;
}

std::uint64_t memory_footprint(std::span<const TensorLayout> tensors, Precision precision) {
  if (precision.full) {
    std::uint64_t total = 0;
    for (const auto& t : tensors) total += 2 * t.element_count();
    return total;
  }
  if (precision.bits < 1 || precision.bits > 16) {
    throw InvalidInput("memory_footprint: bits must be in [1, 16]");
  }
  for (const auto& t : tensors) {
    if (t.codebook_size == 0 || t.codebook_size > (std::size_t{1} << precision.bits)) {
      throw InvalidInput("memory_footprint: codebook size of '" + t.name +
                         "' inconsistent with bit width");
    }
  }
  return codec::compressed_size(tensors);
}

namespace {

std::size_t distinct_count(const Matrix& m) {
  std::vector<double> v(m.data(), m.data() + m.size());
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

TensorLayout layout_for(const std::string& name, const Matrix& m, Precision precision) {
  TensorLayout layout;
  layout.name = name;
  layout.shape = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
  if (!precision.full) {
    layout.codebook_size =
        std::min(std::size_t{1} << precision.bits, distinct_count(m));
  }
  return layout;
}

}  // namespace

std::uint64_t memory_footprint(const AdapterSet& set, Precision precision) {
  std::vector<TensorLayout> layouts;
  for (const auto& [name, pair] : set.layers) {
    layouts.push_back(layout_for(name + ".A", pair.a, precision));
    layouts.push_back(layout_for(name + ".B", pair.b, precision));
  }
  return memory_footprint(layouts, precision);
}

}  // namespace deltaq
