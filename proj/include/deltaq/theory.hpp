// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "deltaq/tensor_core.hpp"

namespace deltaq {

/// Stable-rank bounds for a quantized matrix Q(A) in terms of A and the
/// quantization residual eps:
///
///   1/2 (sqrt(SR(A)) - |eps|_F / smax(A)) <= sqrt(SR(Q(A)))
///                                         <= 2 (sqrt(SR(A)) + |eps|_F / smax(A))
///
/// The bounds are guaranteed when smax(A) / 2 <= smax(A) - smax(eps).
/// `preconditions_met` additionally requires smin(A) <= 1 and smax(eps) >= 1.
struct TheoremCheck {
  double sr_a = 0.0;
  double sr_qa = 0.0;
  double eps_frob = 0.0;
  double sigma_max_a = 0.0;
  double sigma_max_eps = 0.0;
  double sigma_min_a = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool preconditions_met = false;
  bool holds = false;
};

TheoremCheck check_theorem(const Matrix& a, int bits);

/// Summary of check_theorem over seeded Gaussian matrices, each rescaled so
/// that its largest singular value equals `target_sigma_max`.
struct TheoremSummary {
  int trials = 0;
  int preconditions_met = 0;
  int holds = 0;
  int holds_when_met = 0;
};

TheoremSummary verify_theorem(Eigen::Index rows, Eigen::Index cols, int bits,
                              std::uint64_t first_seed, int seeds, double target_sigma_max,
                              int threads = 1);

/// Stable ranks of A*B, Q(A)Q(B), sin(w A*B) and sin(w Q(A)Q(B)) for one
/// draw of Gaussian factors with entries ~ N(0, 1/k).
struct SweepPoint {
  int rank = 0;
  double omega = 0.0;
  std::optional<int> bits;  // nullopt = full precision
  std::uint64_t seed = 0;
  double sr_plain = 0.0;
  double sr_quantized = 0.0;
  double sr_sine = 0.0;
  double sr_sine_quantized = 0.0;
};

struct SweepGrid {
  Eigen::Index rows = 64;
  Eigen::Index cols = 64;
  std::vector<int> ranks;
  std::vector<double> omegas;
  std::vector<std::optional<int>> bit_widths;
  std::vector<std::uint64_t> seeds;
};

/// Ordered by (rank, omega, bits, seed) in the order the grid lists them.
std::vector<SweepPoint> sweep_stable_rank(const SweepGrid& grid, int threads = 1);

/// Log-spaced grid lo..hi (inclusive) with `points` entries.
std::vector<double> log_grid(double lo, double hi, int points);

/// CSV header: rank,omega,bits,sr_plain,sr_quantized,sr_sine,sr_sine_quantized,seed
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace deltaq
