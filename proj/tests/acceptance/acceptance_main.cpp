// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "deltaq/adapter.hpp"
#include "deltaq/bd_metrics.hpp"
#include "deltaq/codec.hpp"
#include "deltaq/parallel.hpp"
#include "deltaq/quantizer.hpp"
#include "deltaq/theory.hpp"
#include "deltaq/toy_adaptation.hpp"
#include "oracles/finite_difference.hpp"
#include "oracles/kmeans_oracle.hpp"

namespace {

using namespace deltaq;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// --- 1. BD figures ----------------------------------------------------------

struct ReferenceRow {
  int bits;
  std::vector<double> memory;   // MB, ranks 1, 2, 4, 8, 16
  std::vector<double> plain;    // average accuracy
  std::vector<double> sine;
  double bd_rate;
  double bd_quality;
};

Outcome bd_reproduction() {
  const std::vector<ReferenceRow> rows{
      {2, {0.6, 1.1, 2.2, 4.3, 8.6}, {69.7, 71.0, 74.7, 75.2, 77.3}, {70.0, 73.7, 75.1, 76.4, 77.9},
       -41.60, 1.29},
      {3, {0.8, 1.5, 3.0, 6.0, 11.9}, {70.0, 73.1, 75.5, 76.5, 78.4}, {70.5, 74.4, 75.9, 77.7, 78.6},
       -28.51, 0.88},
      {5, {1.2, 2.3, 4.5, 9.1, 18.1}, {69.4, 73.1, 75.6, 76.7, 78.6}, {69.8, 74.4, 76.1, 78.1, 78.8},
       -28.04, 0.96},
      {16, {3.4, 6.8, 13.5, 27.1, 54.0}, {73.7, 74.8, 76.5, 78.0, 79.0},
       {72.8, 75.1, 78.5, 78.8, 78.9}, -30.46, 0.69},
  };
  Outcome out{true, ""};
  for (const auto& row : rows) {
    std::vector<bd::RDPoint> p, s;
    for (std::size_t i = 0; i < row.memory.size(); ++i) {
      p.push_back({row.memory[i], row.plain[i]});
      s.push_back({row.memory[i], row.sine[i]});
    }
    const auto r = bd::bd_compare(bd::RDCurve("plain", p), bd::RDCurve("sine", s));
    const bool ok =
        std::abs(r.bd_rate - row.bd_rate) <= 8.0 && std::abs(r.bd_quality - row.bd_quality) <= 0.30;
    out.pass = out.pass && ok;
    out.detail += fmt("%s%d-bit %.2f%%/%+.2f (target %.2f%%/%+.2f)", out.detail.empty() ? "" : "; ",
                      row.bits, r.bd_rate, r.bd_quality, row.bd_rate, row.bd_quality);
  }
  return out;
}

// --- 2. Memory accounting ----------------------------------------------------

std::vector<TensorLayout> eight_billion_rank8_layout(int bits) {
  struct Proj {
    const char* name;
    std::uint32_t in, out;
  };
  const Proj projections[] = {{"q_proj", 4096, 4096}, {"k_proj", 4096, 1024},
                              {"v_proj", 4096, 1024}, {"up_proj", 4096, 14336},
                              {"down_proj", 14336, 4096}};
  const std::uint32_t rank = 8;
  const std::size_t levels = std::size_t{1} << bits;
  std::vector<TensorLayout> layouts;
  for (int layer = 0; layer < 32; ++layer) {
    for (const auto& p : projections) {
      const std::string base = "layers." + std::to_string(layer) + "." + p.name;
      layouts.push_back({base + ".A", {p.in, rank}, levels});
      layouts.push_back({base + ".B", {rank, p.out}, levels});
    }
  }
  return layouts;
}

Outcome memory_accounting() {
  const auto layouts5 = eight_billion_rank8_layout(5);
  std::uint64_t params = 0;
  for (const auto& t : layouts5) params += t.element_count();
  const double q5 = to_mebibytes(memory_footprint(layouts5, Precision::quantized(5)));
  const double full = to_mebibytes(memory_footprint(layouts5, Precision::full_precision()));
  const bool ok5 = std::abs(q5 - 9.1) <= 0.1 * 9.1;
  const bool ok16 = std::abs(full - 27.1) <= 0.1 * 27.1;
  return {ok5 && ok16, fmt("%llu params; 5-bit %.3f MiB (target 9.1 +/-10%%), 16-bit %.3f MiB "
                           "(target 27.1 +/-10%%)",
                           static_cast<unsigned long long>(params), q5, full)};
}

// --- 3. Quantized stable-rank bounds -----------------------------------------

// Optimal scalar quantizer MSE for a unit Gaussian at 2..8 bits, used only to
// pick a scale; preconditions are still evaluated exactly by check_theorem.
constexpr std::array<double, 7> kGaussianDistortion = {0.1175,   0.03454,   0.009497, 0.002499,
                                                       6.418e-4, 1.625e-4, 4.09e-5};

Outcome theorem_suite(int threads) {
  constexpr int kRequired = 1000;
  constexpr int kBatch = 250;
  int met = 0, held = 0, trials = 0;
  std::uint64_t next_seed = 0;
  while (met < kRequired && trials < 20 * kRequired) {
    std::vector<TheoremCheck> batch(kBatch);
    parallel_for(batch.size(), threads, [&](std::size_t i) {
      std::mt19937_64 rng(next_seed + i);
      std::uniform_int_distribution<int> dim(16, 128);
      std::uniform_int_distribution<int> bits_dist(2, 8);
      std::uniform_real_distribution<double> target_eps(1.2, 3.0);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const int rows = dim(rng), cols = dim(rng), bits = bits_dist(rng);

      // Entry scale chosen so the predicted ||eps||_2 lands in [1.2, 3].
      const double noise = std::sqrt(kGaussianDistortion[bits - 2]) *
                           (std::sqrt(double(rows)) + std::sqrt(double(cols)));
      Matrix a = gaussian_matrix(rows, cols, target_eps(rng) / noise, rng);

      // Plant a smallest singular value below 1; rectangular Gaussians
      // almost never have one at this scale.
      Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::Index last = svd.singularValues().size() - 1;
      a += (unit(rng) - svd.singularValues()(last)) * svd.matrixU().col(last) *
           svd.matrixV().col(last).transpose();
      batch[i] = check_theorem(a, bits);
    });
    next_seed += kBatch;
    for (const auto& c : batch) {
      ++trials;
      if (c.preconditions_met) {
        ++met;
        held += c.holds;
      }
    }
  }
  return {met >= kRequired && held == met,
          fmt("bound held in %d/%d precondition-met cases (%d trials)", held, met, trials)};
}

// --- 4. Stable-rank sweep phenomena ------------------------------------------

Outcome omega_saturation(int threads) {
  SweepGrid grid;
  grid.ranks = {4};
  grid.omegas = log_grid(1.0, 1000.0, 13);
  grid.omegas.insert(grid.omegas.begin(), 1e-6);
  grid.bit_widths = {std::nullopt};
  for (std::uint64_t s = 0; s < 20; ++s) grid.seeds.push_back(s);
  const auto points = sweep_stable_rank(grid, threads);

  const std::size_t n_seed = grid.seeds.size();
  std::vector<double> mean(grid.omegas.size(), 0.0);
  bool small_angle = true;
  for (std::size_t oi = 0; oi < grid.omegas.size(); ++oi) {
    for (std::size_t si = 0; si < n_seed; ++si) {
      const auto& p = points[oi * n_seed + si];
      mean[oi] += p.sr_sine / static_cast<double>(n_seed);
      if (oi == 0) small_angle &= std::abs(p.sr_sine - p.sr_plain) <= 1e-6 * p.sr_plain;
    }
  }
  const double at_one = mean[1];
  const double peak = *std::max_element(mean.begin() + 1, mean.end());
  const double last = mean.back(), before = mean[mean.size() - 2];
  const double change = std::abs(last - before) / before;
  const bool ok = small_angle && peak > at_one && change < 0.05;
  return {ok, fmt("w->0 matches plain: %s; mean sr_sine %.3f at w=1, peak %.3f, last two %.3f/%.3f "
                  "(change %.2f%%, limit 5%%)",
                  small_angle ? "yes" : "no", at_one, peak, before, last, 100.0 * change)};
}

std::vector<SweepPoint> bits_sweep(int threads) {
  SweepGrid grid;
  grid.ranks = {4};
  grid.omegas = {200.0};
  grid.bit_widths = {1, 2, 3, 4, 5, 8};
  for (std::uint64_t s = 0; s < 100; ++s) grid.seeds.push_back(s);
  return sweep_stable_rank(grid, threads);
}

Outcome bits_recovery(const std::vector<SweepPoint>& points) {
  constexpr std::size_t kSeeds = 100, kBits = 6;
  int monotone = 0;
  std::vector<double> mean(kBits, 0.0);
  for (std::size_t si = 0; si < kSeeds; ++si) {
    bool ok = true;
    for (std::size_t bi = 0; bi < kBits; ++bi) {
      const double v = points[bi * kSeeds + si].sr_sine_quantized;
      mean[bi] += v / kSeeds;
      if (bi > 0 && v < points[(bi - 1) * kSeeds + si].sr_sine_quantized) ok = false;
    }
    monotone += ok;
  }
  return {monotone >= 90,
          fmt("%d/100 seeds non-decreasing over bits {1,2,3,4,5,8} (need 90); mean sr_sine_q "
              "%.2f %.2f %.2f %.2f %.2f %.2f",
              monotone, mean[0], mean[1], mean[2], mean[3], mean[4], mean[5])};
}

Outcome sine_beats_quantized(const std::vector<SweepPoint>& points) {
  constexpr std::size_t kSeeds = 100, kBits = 6;
  int seeds_ok = 0;
  for (std::size_t si = 0; si < kSeeds; ++si) {
    bool ok = true;
    for (std::size_t bi = 2; bi < kBits; ++bi) {
      const auto& p = points[bi * kSeeds + si];
      ok = ok && p.sr_sine_quantized > p.sr_quantized;
    }
    seeds_ok += ok;
  }
  return {seeds_ok >= 95,
          fmt("%d/100 seeds with sr_sine_q > sr_q at every bits >= 3 (need 95)", seeds_ok)};
}

// --- 5. k-means oracle equivalence -------------------------------------------

Outcome kmeans_oracle() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> size(1, 10), clusters(1, 3), small_int(-4, 4);
  std::normal_distribution<double> normal(0.0, 2.0);
  int checked = 0, equal = 0;
  auto check = [&](const std::vector<double>& v, int k) {
    ++checked;
    equal += kmeans_1d(v, k).cost == oracle::kmeans_cost(v, k);
  };
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(size(rng));
    for (auto& x : v) x = trial % 2 ? normal(rng) : small_int(rng);
    check(v, clusters(rng));
  }
  const std::vector<std::vector<double>> ties{
      {0, 1, 2},       {0, 1, 2, 3},          {0, 0, 1, 1, 2, 2}, {0, 2, 4, 6, 8, 10},
      {5, 5, 5, 5},    {1, 2, 2, 3},          {-2, -1, 1, 2},     {0, 1, 3, 4, 6, 7},
      {0.1, 0.2, 0.3}, {1e6, 1e6 + 1, 1e6 + 2}, {0, 1, 1, 1, 2},  {3, 3, 1, 1, 2, 2, 0, 4, 4, 4}};
  for (const auto& v : ties) {
    for (int k = 1; k <= 3; ++k) check(v, k);
  }
  return {equal == checked, fmt("%d/%d instances with cost equal to the exhaustive oracle", equal,
                                checked)};
}

// --- 6. Codec round-trip ------------------------------------------------------

Outcome codec_round_trip() {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> dim(1, 40), flip(1, 255);
  int round_trips = 0, widths_ok = 0, flips = 0, detected = 0;
  for (int bits = 1; bits <= 16; ++bits) {
    bool width_ok = true;
    for (int set = 0; set < 4; ++set) {
      codec::CompressedAdapter adapter;
      adapter.metadata = {bits, set % 2 ? Flavor::Sine : Flavor::Plain, 200.0f, 1.0f};
      for (int layer = 0; layer < 3; ++layer) {
        const int m = dim(rng), n = dim(rng), k = std::min({m, n, 8});
        const std::string base = "layer" + std::to_string(layer);
        adapter.tensors.push_back({base + ".A", quantize_matrix(gaussian_matrix(m, k, 1.0, rng), bits)});
        adapter.tensors.push_back({base + ".B", quantize_matrix(gaussian_matrix(k, n, 1.0, rng), bits)});
      }
      const auto bytes = codec::write_compressed(adapter);
      const auto back = codec::read_compressed(bytes);
      const bool ok = back == adapter && codec::write_compressed(back) == bytes;
      width_ok = width_ok && ok;
      round_trips += ok;
      if (set == 0) {
        for (std::size_t pos = 0; pos < bytes.size(); ++pos) {
          auto corrupt = bytes;
          corrupt[pos] ^= static_cast<std::uint8_t>(flip(rng));
          ++flips;
          try {
            codec::read_compressed(corrupt);
          } catch (const CorruptData&) {
            ++detected;
          }
        }
      }
    }
    widths_ok += width_ok;
  }
  return {widths_ok == 16 && detected == flips,
          fmt("%d/64 round trips identical, %d/16 bit widths clean, %d/%d single-byte flips "
              "detected",
              round_trips, widths_ok, detected, flips)};
}

// --- 7. Gradients --------------------------------------------------------------

Outcome gradient_check() {
  std::mt19937_64 rng(7);
  const double omegas[] = {1.0, 10.0, 50.0, 200.0};
  double worst = 0.0;
  int passed = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Flavor flavor = trial % 2 ? Flavor::Sine : Flavor::Plain;
    const double omega = omegas[(trial / 2) % 4];
    const Matrix a = gaussian_matrix(8, 2, 1.0 / std::sqrt(2.0), rng);
    const Matrix b = gaussian_matrix(2, 8, 1.0 / std::sqrt(2.0), rng);
    const Matrix target = gaussian_matrix(8, 8, 0.3, rng);
    // Central-difference truncation error grows like (omega * h)^2, so the
    // step shrinks with frequency.
    const double h = std::min(1e-5, 2e-4 / omega);
    const auto m = oracle::check_gradients(a, b, target, flavor, omega, std::sqrt(8.0), h);
    worst = std::max(worst, m.worst);
    passed += m.worst < 1e-4;
  }
  return {passed == 100, fmt("%d/100 instances within 1e-4 relative (worst %.2e)", passed, worst)};
}

// --- 8. Expressivity -----------------------------------------------------------

Outcome expressivity(int threads) {
  ExpressivityOptions opts;
  opts.threads = threads;
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 20; ++s) seeds.push_back(s);
  const auto rows = expressivity_report(64, 64, {4}, seeds, opts);
  int wins = 0;
  double plain_mean = 0.0, sine_mean = 0.0;
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    wins += rows[i + 1].final_loss < rows[i].final_loss;
    plain_mean += rows[i].final_loss / 20.0;
    sine_mean += rows[i + 1].final_loss / 20.0;
  }
  return {wins >= 18, fmt("sine lower loss in %d/20 seeds (need 18); mean loss plain %.4f, sine "
                          "%.4f after %d iterations",
                          wins, plain_mean, sine_mean, opts.iterations)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deltaq acceptance suite"};
  int threads = 1;
  std::vector<std::string> only;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "Run only these criterion ids (e.g. 3 4b)");
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  auto run = [&](const char* id, const char* name, double budget_s,
                 const std::function<Outcome()>& body) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) return;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > budget_s) {
      o.pass = false;
      o.detail += fmt(" [over time budget %.0fs]", budget_s);
    }
    failures += !o.pass;
    std::printf("%s [%s] %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  };

  std::vector<SweepPoint> bits_points;
  run("1", "BD reproduction", 1.0, bd_reproduction);
  run("2", "memory accounting", 1.0, memory_accounting);
  run("3", "quantized stable-rank bounds", 60.0, [&] { return theorem_suite(threads); });
  run("4a", "omega saturation", 120.0, [&] { return omega_saturation(threads); });
  run("4b", "bits recovery", 120.0, [&] {
    bits_points = bits_sweep(threads);
    return bits_recovery(bits_points);
  });
  run("4c", "sine over quantized", 120.0, [&] {
    if (bits_points.empty()) bits_points = bits_sweep(threads);
    return sine_beats_quantized(bits_points);
  });
  run("5", "k-means oracle equivalence", 30.0, kmeans_oracle);
  run("6", "codec round-trip", 30.0, codec_round_trip);
  run("7", "gradient correctness", 30.0, gradient_check);
  run("8", "expressivity", 300.0, [&] { return expressivity(threads); });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
