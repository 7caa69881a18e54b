// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "deltaq/adapter.hpp"
#include "deltaq/quantizer.hpp"

namespace deltaq::codec {

// Both containers use little-endian integers and IEEE-754 binary32 values.
// Strings are a u16 byte length followed by the raw bytes.
//
// Raw tensor container:
//   "ADLT" u16 version=1 u32 count
//   count x { str name, u8 ndim, u32 dims[ndim], f32 values[prod(dims)] }
//
// Compressed container:
//   "SLDQ" u16 version=1                                   (header)
//   u8 bits, u8 flavor, f32 omega, f32 gamma_multiplier, u32 count
//   count x { str name, u8 ndim, u32 dims[ndim], u32 L, f32 centers[L],
//             u8 packed[ceil(prod(dims) * w / 8)] }   w = ceil(log2(max(L, 2)))
//   u32 crc32 of every byte between the header and the checksum
inline constexpr std::array<char, 4> kTensorMagic = {'A', 'D', 'L', 'T'};
inline constexpr std::array<char, 4> kCompressedMagic = {'S', 'L', 'D', 'Q'};
inline constexpr std::uint16_t kVersion = 1;

inline constexpr std::size_t kHeaderBytes = 4 + 2;
inline constexpr std::size_t kGlobalFieldBytes = 1 + 1 + 4 + 4 + 4;
inline constexpr std::size_t kChecksumBytes = 4;

using Bytes = std::vector<std::uint8_t>;

/// Index width used for a codebook of `levels` entries.
int index_width(std::size_t levels);

/// LSB-first packing: index i occupies bits [i*w, (i+1)*w) of the stream.
Bytes pack_indices(std::span<const std::uint32_t> indices, int bits_per_index);
std::vector<std::uint32_t> unpack_indices(std::span<const std::uint8_t> bytes, int bits_per_index,
                                          std::size_t count);

/// CRC-32 (reflected polynomial 0xEDB88320).
std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// Order-0 Shannon entropy of the index stream, in bits per element.
double index_entropy(const QuantizedTensor& q);

struct NamedMatrix {
  std::string name;
  Matrix value;
};

struct NamedQuantized {
  std::string name;
  QuantizedTensor tensor;
  bool operator==(const NamedQuantized&) const = default;
};

struct AdapterMetadata {
  int bits = 4;
  Flavor flavor = Flavor::Sine;
  float omega = static_cast<float>(kDefaultOmega);
  float gamma_multiplier = 1.0f;
  bool operator==(const AdapterMetadata&) const = default;
};

struct CompressedAdapter {
  AdapterMetadata metadata;
  std::vector<NamedQuantized> tensors;
  bool operator==(const CompressedAdapter&) const = default;
};

/// Values are narrowed to binary32 on write.
Bytes write_tensors(std::span<const NamedMatrix> tensors);
std::vector<NamedMatrix> read_tensors(std::span<const std::uint8_t> bytes);

Bytes write_compressed(const CompressedAdapter& adapter);
CompressedAdapter read_compressed(std::span<const std::uint8_t> bytes);

/// Exact size in bytes of the compressed container holding `tensors`.
std::uint64_t compressed_size(std::span<const TensorLayout> tensors);

TensorLayout layout_of(const NamedQuantized& tensor);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace deltaq::codec
