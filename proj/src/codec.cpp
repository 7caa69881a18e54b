// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#include "deltaq/codec.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <set>

namespace deltaq::codec {
namespace {

static_assert(std::numeric_limits<float>::is_iec559, "binary32 floats required");

class ByteWriter {
 public:
  explicit ByteWriter(Bytes& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(std::span<const std::uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
  void magic(const std::array<char, 4>& m) {
    for (char c : m) out_.push_back(static_cast<std::uint8_t>(c));
  }
  void str(const std::string& s) {
    if (s.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw InvalidInput("tensor name longer than 65535 bytes");
    }
    u16(static_cast<std::uint16_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void shape(const std::vector<std::uint32_t>& dims) {
    if (dims.empty() || dims.size() > 255) throw InvalidInput("tensor rank must be in [1, 255]");
    u8(static_cast<std::uint8_t>(dims.size()));
    for (auto d : dims) u32(d);
  }

 private:
  Bytes& out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

  std::span<const std::uint8_t> take(std::size_t n, const char* field) {
    if (n > remaining()) {
      throw CorruptData(std::string("truncated data reading ") + field + " at offset " +
                        std::to_string(pos_));
    }
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t u8(const char* field) { return take(1, field)[0]; }
  std::uint16_t u16(const char* field) {
    auto b = take(2, field);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32(const char* field) {
    auto b = take(4, field);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }
  float f32(const char* field) { return std::bit_cast<float>(u32(field)); }
  std::string str(const char* field) {
    const std::uint16_t len = u16(field);
    auto b = take(len, field);
    return std::string(b.begin(), b.end());
  }
  std::vector<std::uint32_t> shape() {
    const std::uint8_t ndim = u8("ndim");
    if (ndim == 0) throw CorruptData("tensor with zero dimensions at offset " + std::to_string(pos_));
    std::vector<std::uint32_t> dims(ndim);
    for (auto& d : dims) {
      d = u32("dimension");
      if (d == 0) throw CorruptData("zero-length dimension at offset " + std::to_string(pos_));
    }
    return dims;
  }
  void magic(const std::array<char, 4>& expected) {
    auto b = take(4, "magic");
    if (std::memcmp(b.data(), expected.data(), 4) != 0) {
      throw CorruptData("bad magic: expected '" + std::string(expected.begin(), expected.end()) +
                        "'");
    }
  }
  void version() {
    const std::uint16_t v = u16("version");
    if (v != kVersion) throw CorruptData("unsupported version " + std::to_string(v));
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint64_t element_count(const std::vector<std::uint32_t>& dims) {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::uint64_t packed_bytes(std::uint64_t count, int width) {
  return (count * static_cast<std::uint64_t>(width) + 7) / 8;
}

std::vector<std::uint32_t> matrix_shape(const Matrix& m) {
  return {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
}

Matrix shaped_matrix(const std::vector<std::uint32_t>& dims) {
  if (dims.size() > 2) throw CorruptData("only 1D and 2D tensors are supported");
  const Eigen::Index rows = dims.size() == 2 ? dims[0] : 1;
  return Matrix(rows, dims.back());
}

void require_unique(std::set<std::string>& seen, const std::string& name) {
  if (!seen.insert(name).second) throw CorruptData("duplicate tensor name '" + name + "'");
}

}  // namespace

int index_width(std::size_t levels) {
  int w = 1;
  while ((std::size_t{1} << w) < levels) ++w;
  return w;
}

Bytes pack_indices(std::span<const std::uint32_t> indices, int bits_per_index) {
  if (bits_per_index < 1 || bits_per_index > 32) {
    throw InvalidInput("pack_indices: width must be in [1, 32]");
  }
  const std::uint64_t limit = std::uint64_t{1} << bits_per_index;
  Bytes out(packed_bytes(indices.size(), bits_per_index), 0);
  std::uint64_t bit = 0;
  for (std::uint32_t idx : indices) {
    if (idx >= limit) {
      throw InvalidInput("pack_indices: index " + std::to_string(idx) + " does not fit in " +
                         std::to_string(bits_per_index) + " bits");
    }
    for (int b = 0; b < bits_per_index; ++b, ++bit) {
      if ((idx >> b) & 1u) out[bit >> 3] |= static_cast<std::uint8_t>(1u << (bit & 7));
    }
  }
  return out;
}

std::vector<std::uint32_t> unpack_indices(std::span<const std::uint8_t> bytes, int bits_per_index,
                                          std::size_t count) {
  if (bits_per_index < 1 || bits_per_index > 32) {
    throw InvalidInput("unpack_indices: width must be in [1, 32]");
  }
  if (bytes.size() < packed_bytes(count, bits_per_index)) {
    throw CorruptData("unpack_indices: stream of " + std::to_string(bytes.size()) +
                      " bytes too short for " + std::to_string(count) + " indices");
  }
  std::vector<std::uint32_t> out(count, 0);
  std::uint64_t bit = 0;
  for (auto& idx : out) {
    for (int b = 0; b < bits_per_index; ++b, ++bit) {
      if ((bytes[bit >> 3] >> (bit & 7)) & 1u) idx |= std::uint32_t{1} << b;
    }
  }
  return out;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes a uInt length; feed large buffers in chunks.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto chunk =
        static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, std::size_t{1} << 30));
    crc = ::crc32(crc, bytes.data() + pos, chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

double index_entropy(const QuantizedTensor& q) {
  if (q.indices.empty()) throw InvalidInput("index_entropy: empty index stream");
  std::map<std::uint32_t, std::size_t> histogram;
  for (auto idx : q.indices) ++histogram[idx];
  const double n = static_cast<double>(q.indices.size());
  double h = 0.0;
  for (const auto& [symbol, count] : histogram) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

Bytes write_tensors(std::span<const NamedMatrix> tensors) {
  Bytes out;
  ByteWriter w(out);
  w.magic(kTensorMagic);
  w.u16(kVersion);
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  std::set<std::string> seen;
  for (const auto& t : tensors) {
    if (!seen.insert(t.name).second) throw InvalidInput("duplicate tensor name '" + t.name + "'");
    if (t.value.size() == 0) throw InvalidInput("tensor '" + t.name + "' is empty");
    w.str(t.name);
    w.shape(matrix_shape(t.value));
    for (Eigen::Index i = 0; i < t.value.size(); ++i) {
      w.f32(static_cast<float>(t.value.data()[i]));
    }
  }
  return out;
}

std::vector<NamedMatrix> read_tensors(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.magic(kTensorMagic);
  r.version();
  const std::uint32_t count = r.u32("tensor count");
  std::vector<NamedMatrix> out;
  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedMatrix t;
    t.name = r.str("tensor name");
    require_unique(seen, t.name);
    const auto dims = r.shape();
    const std::uint64_t n = element_count(dims);
    if (n * 4 > r.remaining()) throw CorruptData("tensor '" + t.name + "' payload truncated");
    t.value = shaped_matrix(dims);
    for (std::uint64_t k = 0; k < n; ++k) t.value.data()[k] = r.f32("value");
    out.push_back(std::move(t));
  }
  if (r.remaining() != 0) {
    throw CorruptData(std::to_string(r.remaining()) + " trailing bytes after last tensor");
  }
  return out;
}

Bytes write_compressed(const CompressedAdapter& adapter) {
  const auto& meta = adapter.metadata;
  if (meta.bits < 1 || meta.bits > 16) throw InvalidInput("write_compressed: bits out of range");

  Bytes out;
  ByteWriter w(out);
  w.magic(kCompressedMagic);
  w.u16(kVersion);
  w.u8(static_cast<std::uint8_t>(meta.bits));
  w.u8(static_cast<std::uint8_t>(meta.flavor));
  w.f32(meta.omega);
  w.f32(meta.gamma_multiplier);
  w.u32(static_cast<std::uint32_t>(adapter.tensors.size()));

  std::set<std::string> seen;
  for (const auto& [name, q] : adapter.tensors) {
    if (!seen.insert(name).second) throw InvalidInput("duplicate tensor name '" + name + "'");
    Codebook book = q.codebook;
    book.bits = meta.bits;
    validate(book);
    if (q.indices.size() != element_count(q.shape)) {
      throw InvalidInput("tensor '" + name + "': index count does not match shape");
    }
    w.str(name);
    w.shape(q.shape);
    w.u32(static_cast<std::uint32_t>(book.size()));
    for (float c : book.centers) w.f32(c);
    w.raw(pack_indices(q.indices, index_width(book.size())));
  }
  const std::uint32_t crc =
      crc32(std::span<const std::uint8_t>(out).subspan(kHeaderBytes));
  w.u32(crc);
  return out;
}

CompressedAdapter read_compressed(std::span<const std::uint8_t> bytes) {
  ByteReader header(bytes);
  header.magic(kCompressedMagic);
  header.version();
  if (bytes.size() < kHeaderBytes + kGlobalFieldBytes + kChecksumBytes) {
    throw CorruptData("compressed container truncated");
  }
  const auto payload = bytes.subspan(kHeaderBytes, bytes.size() - kHeaderBytes - kChecksumBytes);
  ByteReader trailer(bytes.subspan(bytes.size() - kChecksumBytes));
  const std::uint32_t stored = trailer.u32("checksum");
  const std::uint32_t actual = crc32(payload);
  if (stored != actual) throw CorruptData("checksum mismatch");

  ByteReader r(payload);
  CompressedAdapter adapter;
  auto& meta = adapter.metadata;
  meta.bits = r.u8("bits");
  if (meta.bits < 1 || meta.bits > 16) throw CorruptData("bits field out of range");
  const std::uint8_t flavor = r.u8("flavor");
  if (flavor > 1) throw CorruptData("unknown flavor " + std::to_string(flavor));
  meta.flavor = static_cast<Flavor>(flavor);
  meta.omega = r.f32("omega");
  meta.gamma_multiplier = r.f32("gamma multiplier");
  const std::uint32_t count = r.u32("tensor count");

  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedQuantized t;
    t.name = r.str("tensor name");
    require_unique(seen, t.name);
    t.tensor.shape = r.shape();
    const std::uint32_t levels = r.u32("codebook length");
    if (levels == 0 || levels > (std::uint32_t{1} << meta.bits)) {
      throw CorruptData("tensor '" + t.name + "': codebook length " + std::to_string(levels) +
                        " invalid for " + std::to_string(meta.bits) + " bits");
    }
    t.tensor.codebook.bits = meta.bits;
    t.tensor.codebook.centers.resize(levels);
    for (auto& c : t.tensor.codebook.centers) c = r.f32("codebook center");
    try {
      validate(t.tensor.codebook);
    } catch (const InvalidInput& e) {
      throw CorruptData("tensor '" + t.name + "': " + e.what());
    }
    const std::uint64_t n = element_count(t.tensor.shape);
    const int width = index_width(levels);
    const auto packed = r.take(packed_bytes(n, width), "index stream");
    t.tensor.indices = unpack_indices(packed, width, n);
    for (auto idx : t.tensor.indices) {
      if (idx >= levels) throw CorruptData("tensor '" + t.name + "': index outside codebook");
    }
    adapter.tensors.push_back(std::move(t));
  }
  if (r.remaining() != 0) throw CorruptData("trailing bytes before checksum");
  return adapter;
}

std::uint64_t compressed_size(std::span<const TensorLayout> tensors) {
  std::uint64_t total = kHeaderBytes + kGlobalFieldBytes + kChecksumBytes;
  for (const auto& t : tensors) {
    total += 2 + t.name.size();              // name
    total += 1 + 4 * t.shape.size();         // shape
    total += 4 + 4 * t.codebook_size;        // codebook
    total += packed_bytes(t.element_count(), index_width(t.codebook_size));
  }
  return total;
}

TensorLayout layout_of(const NamedQuantized& tensor) {
  return {tensor.name, tensor.tensor.shape, tensor.tensor.codebook.size()};
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InvalidInput("failed writing '" + path.string() + "'");
}

}  // namespace deltaq::codec
