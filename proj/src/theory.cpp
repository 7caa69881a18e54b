// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#include "deltaq/theory.hpp"

#include <cmath>
#include <iomanip>
#include <random>

#include "deltaq/adapter.hpp"
#include "deltaq/parallel.hpp"
#include "deltaq/quantizer.hpp"

namespace deltaq {

TheoremCheck check_theorem(const Matrix& a, int bits) {
  require_finite(a);
  if (a.isZero(0)) throw DomainError("check_theorem: matrix is all zero");

  const Matrix eps = quantization_error(a, quantize_matrix(a, bits));
  const Matrix qa = a + eps;

  // Both A and eps are typically noise-like, so the dense path is used
  // throughout instead of power iteration.
  const auto range_a = singular_extremes(a);
  const double sigma_qa = singular_extremes(qa).max;
  if (sigma_qa == 0.0) throw DomainError("check_theorem: quantized matrix is all zero");

  TheoremCheck c;
  c.sigma_max_a = range_a.max;
  c.sigma_min_a = range_a.min;
  c.sr_a = a.squaredNorm() / (c.sigma_max_a * c.sigma_max_a);
  c.sr_qa = qa.squaredNorm() / (sigma_qa * sigma_qa);
  c.eps_frob = eps.norm();
  c.sigma_max_eps = singular_extremes(eps).max;

  const double root = std::sqrt(c.sr_a);
  const double ratio = c.eps_frob / c.sigma_max_a;
  c.lower_bound = 0.5 * (root - ratio);
  c.upper_bound = 2.0 * (root + ratio);

  const double root_q = std::sqrt(c.sr_qa);
  c.holds = c.lower_bound <= root_q && root_q <= c.upper_bound;
  c.preconditions_met = c.sigma_min_a <= 1.0 && c.sigma_max_eps >= 1.0 &&
                        c.sigma_max_a / 2.0 <= c.sigma_max_a - c.sigma_max_eps;
  return c;
}

TheoremSummary verify_theorem(Eigen::Index rows, Eigen::Index cols, int bits,
                              std::uint64_t first_seed, int seeds, double target_sigma_max,
                              int threads) {
  if (seeds < 0) throw InvalidInput("verify_theorem: negative seed count");
  std::vector<TheoremCheck> checks(static_cast<std::size_t>(seeds));
  parallel_for(checks.size(), threads, [&](std::size_t i) {
    std::seed_seq seq{first_seed + i, static_cast<std::uint64_t>(rows),
                      static_cast<std::uint64_t>(cols)};
    std::mt19937_64 rng(seq);
    Matrix a = gaussian_matrix(rows, cols, 1.0, rng);
    a *= target_sigma_max / singular_extremes(a).max;
    checks[i] = check_theorem(a, bits);
  });

  TheoremSummary s;
  for (const auto& c : checks) {
    ++s.trials;
    s.preconditions_met += c.preconditions_met;
    s.holds += c.holds;
    s.holds_when_met += c.preconditions_met && c.holds;
  }
  return s;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw InvalidInput("log_grid: bad range");
  std::vector<double> out(static_cast<std::size_t>(points));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] =
        points == 1 ? lo : std::pow(10.0, a + (b - a) * i / (points - 1));
  }
  return out;
}

std::vector<SweepPoint> sweep_stable_rank(const SweepGrid& grid, int threads) {
  for (int k : grid.ranks) {
    if (k < 1 || k > std::min(grid.rows, grid.cols)) {
      throw InvalidInput("sweep_stable_rank: rank " + std::to_string(k) + " outside [1, min(m, n)]");
    }
  }
  for (const auto& b : grid.bit_widths) {
    if (b && (*b < 1 || *b > 16)) throw InvalidInput("sweep_stable_rank: bits out of range");
  }

  const std::size_t n_omega = grid.omegas.size();
  const std::size_t n_bits = grid.bit_widths.size();
  const std::size_t n_seed = grid.seeds.size();
  std::vector<SweepPoint> out(grid.ranks.size() * n_omega * n_bits * n_seed);

  const std::size_t tasks = grid.ranks.size() * n_seed;
  parallel_for(tasks, threads, [&](std::size_t task) {
    const std::size_t ri = task / n_seed;
    const std::size_t si = task % n_seed;
    const int k = grid.ranks[ri];
    const std::uint64_t seed = grid.seeds[si];

    std::seed_seq seq{seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(grid.rows),
                      static_cast<std::uint64_t>(grid.cols)};
    std::mt19937_64 rng(seq);
    const double stddev = 1.0 / std::sqrt(static_cast<double>(k));
    const Matrix a = gaussian_matrix(grid.rows, k, stddev, rng);
    const Matrix b = gaussian_matrix(k, grid.cols, stddev, rng);
    const Matrix product = a * b;
    const double sr_plain = stable_rank(product);

    std::vector<double> sr_sine(n_omega);
    for (std::size_t oi = 0; oi < n_omega; ++oi) {
      sr_sine[oi] = stable_rank(activate(product, Flavor::Sine, grid.omegas[oi], 1.0));
    }

    for (std::size_t bi = 0; bi < n_bits; ++bi) {
      const auto& bits = grid.bit_widths[bi];
      const Matrix quantized_product =
          bits ? Matrix(dequantize(quantize_matrix(a, *bits)) * dequantize(quantize_matrix(b, *bits)))
               : product;
      const double sr_quantized = stable_rank(quantized_product);
      for (std::size_t oi = 0; oi < n_omega; ++oi) {
        SweepPoint& p = out[((ri * n_omega + oi) * n_bits + bi) * n_seed + si];
        p.rank = k;
        p.omega = grid.omegas[oi];
        p.bits = bits;
        p.seed = seed;
        p.sr_plain = sr_plain;
        p.sr_quantized = sr_quantized;
        p.sr_sine = sr_sine[oi];
        p.sr_sine_quantized =
            stable_rank(activate(quantized_product, Flavor::Sine, grid.omegas[oi], 1.0));
      }
    }
  });
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "rank,omega,bits,sr_plain,sr_quantized,sr_sine,sr_sine_quantized,seed\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(6);
  for (const auto& p : points) {
    out << p.rank << ',' << p.omega << ',';
    if (p.bits) {
      out << *p.bits;
    } else {
      out << "full";
    }
    out << ',' << p.sr_plain << ',' << p.sr_quantized << ',' << p.sr_sine << ','
        << p.sr_sine_quantized << ',' << p.seed << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace deltaq
