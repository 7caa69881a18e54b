// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace deltaq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: bad shapes, non-finite entries, out-of-range widths.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The input is well formed but the operation is undefined on it
/// (e.g. stable rank of the zero matrix, disjoint BD curves).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative or numerical failure. Carries the last iterate when one exists.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what, std::optional<double> last_value = std::nullopt)
      : Error(what), last_value_(last_value) {}

  std::optional<double> last_value() const { return last_value_; }

 private:
  std::optional<double> last_value_;
};

/// Serialized data failed validation (magic, version, checksum, lengths).
class CorruptData : public Error {
 public:
  using Error::Error;
};

}  // namespace deltaq
