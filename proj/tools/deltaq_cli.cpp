// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: quantize, reconstruct, sweep, verify-theorem, bd, fit, info.
// Exit codes: 0 ok, 2 usage or input error, 3 numeric error, 4 corrupt data.

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "deltaq/adapter.hpp"
#include "deltaq/bd_metrics.hpp"
#include "deltaq/codec.hpp"
#include "deltaq/parallel.hpp"
#include "deltaq/quantizer.hpp"
#include "deltaq/theory.hpp"
#include "deltaq/toy_adaptation.hpp"

namespace {

using nlohmann::json;
using namespace deltaq;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCorrupt = 4;

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double round6(double v) { return std::stod(fmt6(v)); }

void emit_json(const json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<std::uint64_t> seed_range(std::uint64_t first, int count) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < count; ++i) out.push_back(first + static_cast<std::uint64_t>(i));
  return out;
}

std::optional<int> parse_bits_token(const std::string& token) {
  if (token == "full") return std::nullopt;
  std::size_t used = 0;
  int b = 0;
  try {
    b = std::stoi(token, &used);
  } catch (const std::exception&) {
    throw InvalidInput("bad bit width '" + token + "'");
  }
  if (used != token.size() || b < 1 || b > 16) {
    throw InvalidInput("bad bit width '" + token + "' (expected 1..16 or full)");
  }
  return b;
}

// ---------------------------------------------------------------------------

struct QuantizeArgs {
  std::string input, output, flavor = "sine", format = "text";
  int bits = 4;
  double omega = kDefaultOmega;
  double gamma_multiplier = 1.0;
  int threads = 1;
};

int run_quantize(const QuantizeArgs& args) {
  const auto tensors = codec::read_tensors(codec::read_file(args.input));
  codec::CompressedAdapter adapter;
  adapter.metadata = {args.bits, parse_flavor(args.flavor), static_cast<float>(args.omega),
                      static_cast<float>(args.gamma_multiplier)};
  adapter.tensors.resize(tensors.size());
  std::vector<double> mse(tensors.size());
  parallel_for(tensors.size(), args.threads, [&](std::size_t i) {
    adapter.tensors[i].name = tensors[i].name;
    adapter.tensors[i].tensor = quantize_matrix(tensors[i].value, args.bits);
    const Matrix eps = quantization_error(tensors[i].value, adapter.tensors[i].tensor);
    mse[i] = eps.squaredNorm() / static_cast<double>(eps.size());
  });

  const auto bytes = codec::write_compressed(adapter);
  codec::write_file(args.output, bytes);

  std::vector<TensorLayout> layouts;
  for (const auto& t : adapter.tensors) layouts.push_back(codec::layout_of(t));
  const std::uint64_t predicted = memory_footprint(layouts, Precision::quantized(args.bits));

  json report;
  report["bits"] = args.bits;
  report["total_bytes"] = bytes.size();
  report["predicted_bytes"] = predicted;
  report["tensors"] = json::array();
  for (std::size_t i = 0; i < adapter.tensors.size(); ++i) {
    const auto& q = adapter.tensors[i].tensor;
    const int width = codec::index_width(q.codebook.size());
    const double entropy = codec::index_entropy(q);
    report["tensors"].push_back({{"name", adapter.tensors[i].name},
                                 {"levels", q.codebook.size()},
                                 {"index_bits", width},
                                 {"mse", round6(mse[i])},
                                 {"entropy_bits", round6(entropy)},
                                 {"entropy_headroom_bits", round6(width - entropy)}});
  }
  if (args.format == "json") {
    emit_json(report);
  } else if (args.format == "csv") {
    std::cout << "name,levels,index_bits,mse,entropy_bits,entropy_headroom_bits\n";
    for (const auto& t : report["tensors"]) {
      std::cout << t["name"].get<std::string>() << ',' << t["levels"].get<std::size_t>() << ','
                << t["index_bits"].get<int>() << ',' << fmt6(t["mse"].get<double>()) << ','
                << fmt6(t["entropy_bits"].get<double>()) << ','
                << fmt6(t["entropy_headroom_bits"].get<double>()) << '\n';
    }
  } else {
    for (const auto& t : report["tensors"]) {
      std::cout << t["name"].get<std::string>() << ": levels=" << t["levels"].get<std::size_t>()
                << " mse=" << fmt6(t["mse"].get<double>())
                << " entropy=" << fmt6(t["entropy_bits"].get<double>())
                << " headroom=" << fmt6(t["entropy_headroom_bits"].get<double>()) << " bits\n";
    }
    std::cout << "total bytes: " << bytes.size() << " (predicted " << predicted << ")\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ReconstructArgs {
  std::string input, output, format = "text";
  std::optional<std::string> flavor;
  std::optional<double> omega;
  std::optional<double> gamma_multiplier;
};

int run_reconstruct(const ReconstructArgs& args) {
  const auto adapter = codec::read_compressed(codec::read_file(args.input));
  const Flavor flavor = args.flavor ? parse_flavor(*args.flavor) : adapter.metadata.flavor;
  const double omega = args.omega.value_or(adapter.metadata.omega);
  const double multiplier = args.gamma_multiplier.value_or(adapter.metadata.gamma_multiplier);

  std::map<std::string, const QuantizedTensor*> a_side, b_side;
  for (const auto& t : adapter.tensors) {
    const auto& name = t.name;
    if (name.size() > 2 && name.compare(name.size() - 2, 2, ".A") == 0) {
      a_side[name.substr(0, name.size() - 2)] = &t.tensor;
    } else if (name.size() > 2 && name.compare(name.size() - 2, 2, ".B") == 0) {
      b_side[name.substr(0, name.size() - 2)] = &t.tensor;
    } else {
      throw InvalidInput("tensor '" + name + "' is not named <layer>.A or <layer>.B");
    }
  }
  for (const auto& [layer, q] : a_side) {
    if (!b_side.count(layer)) throw InvalidInput("orphan tensor '" + layer + ".A' has no .B");
  }
  for (const auto& [layer, q] : b_side) {
    if (!a_side.count(layer)) throw InvalidInput("orphan tensor '" + layer + ".B' has no .A");
  }

  std::vector<codec::NamedMatrix> deltas;
  json report = json::array();
  for (const auto& [layer, qa] : a_side) {
    const QuantizedTensor& qb = *b_side.at(layer);
    const auto n = static_cast<std::int64_t>(qb.shape.back());
    const double gamma = default_gamma(n, multiplier);
    Matrix delta = reconstruct_quantized_delta(*qa, qb, omega, gamma, flavor);
    report.push_back({{"layer", layer},
                      {"rows", delta.rows()},
                      {"cols", delta.cols()},
                      {"gamma", round6(gamma)},
                      {"frobenius", round6(delta.norm())}});
    deltas.push_back({layer, std::move(delta)});
  }
  codec::write_file(args.output, codec::write_tensors(deltas));

  if (args.format == "json") {
    emit_json({{"flavor", to_string(flavor)}, {"omega", round6(omega)}, {"layers", report}});
  } else if (args.format == "csv") {
    std::cout << "layer,rows,cols,gamma,frobenius\n";
    for (const auto& r : report) {
      std::cout << r["layer"].get<std::string>() << ',' << r["rows"].get<long>() << ','
                << r["cols"].get<long>() << ',' << fmt6(r["gamma"].get<double>()) << ','
                << fmt6(r["frobenius"].get<double>()) << '\n';
    }
  } else {
    for (const auto& r : report) {
      std::cout << r["layer"].get<std::string>() << ": " << r["rows"].get<long>() << "x"
                << r["cols"].get<long>() << " gamma=" << fmt6(r["gamma"].get<double>())
                << " |dW|_F=" << fmt6(r["frobenius"].get<double>()) << '\n';
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  int rows = 64, cols = 64;
  std::vector<int> ranks{4};
  std::vector<double> omegas;
  std::vector<std::string> bits{"1", "2", "3", "4", "5", "8", "full"};
  int seeds = 10;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string format = "text";
  std::string output;
};

// Seed-averaged table, one line per (rank, omega, bits) cell.
void write_sweep_text(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "rank    omega  bits   sr_plain  sr_quant    sr_sine  sr_sine_q  seeds\n";
  std::size_t i = 0;
  while (i < points.size()) {
    std::size_t j = i;
    double plain = 0, quant = 0, sine = 0, sine_q = 0;
    while (j < points.size() && points[j].rank == points[i].rank &&
           points[j].omega == points[i].omega && points[j].bits == points[i].bits) {
      plain += points[j].sr_plain;
      quant += points[j].sr_quantized;
      sine += points[j].sr_sine;
      sine_q += points[j].sr_sine_quantized;
      ++j;
    }
    const double n = static_cast<double>(j - i);
    char line[160];
    std::snprintf(line, sizeof line, "%4d %8s %5s %10s %9s %10s %10s %6zu\n", points[i].rank,
                  fmt6(points[i].omega).c_str(),
                  points[i].bits ? std::to_string(*points[i].bits).c_str() : "full",
                  fmt6(plain / n).c_str(), fmt6(quant / n).c_str(), fmt6(sine / n).c_str(),
                  fmt6(sine_q / n).c_str(), j - i);
    out << line;
    i = j;
  }
}

int run_sweep(const SweepArgs& args) {
  SweepGrid grid;
  grid.rows = args.rows;
  grid.cols = args.cols;
  grid.ranks = args.ranks;
  grid.omegas = args.omegas.empty() ? log_grid(1.0, 1000.0, 13) : args.omegas;
  for (const auto& token : args.bits) grid.bit_widths.push_back(parse_bits_token(token));
  grid.seeds = seed_range(args.seed, args.seeds);
  const auto points = sweep_stable_rank(grid, args.threads);

  std::ostringstream text;
  if (args.format == "json") {
    json arr = json::array();
    for (const auto& p : points) {
      arr.push_back({{"rank", p.rank},
                     {"omega", round6(p.omega)},
                     {"bits", p.bits ? json(*p.bits) : json("full")},
                     {"seed", p.seed},
                     {"sr_plain", round6(p.sr_plain)},
                     {"sr_quantized", round6(p.sr_quantized)},
                     {"sr_sine", round6(p.sr_sine)},
                     {"sr_sine_quantized", round6(p.sr_sine_quantized)}});
    }
    text << arr.dump(2) << '\n';
  } else if (args.format == "csv") {
    write_sweep_csv(text, points);
  } else {
    write_sweep_text(text, points);
  }
  if (args.output.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream out(args.output);
    if (!out) throw InvalidInput("cannot open '" + args.output + "' for writing");
    out << text.str();
    std::cout << "wrote " << points.size() << " sweep points to " << args.output << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  int rows = 128, cols = 128, bits = 4, seeds = 100, threads = 1;
  std::uint64_t seed = 0;
  double sigma_max = 100.0;
  std::string format = "text";
};

int run_verify(const VerifyArgs& args) {
  const auto s =
      verify_theorem(args.rows, args.cols, args.bits, args.seed, args.seeds, args.sigma_max,
                     args.threads);
  const bool violated = s.holds_when_met < s.preconditions_met;
  if (args.format == "json") {
    emit_json({{"trials", s.trials},
               {"holds", s.holds},
               {"preconditions_met", s.preconditions_met},
               {"holds_when_preconditions_met", s.holds_when_met}});
  } else if (args.format == "csv") {
    std::cout << "trials,holds,preconditions_met,holds_when_preconditions_met\n"
              << s.trials << ',' << s.holds << ',' << s.preconditions_met << ','
              << s.holds_when_met << '\n';
  } else {
    std::cout << "holds: " << s.holds << "/" << s.trials
              << " (preconditions met: " << s.preconditions_met << ")\n";
  }
  return violated ? kExitNumeric : kExitOk;
}

// ---------------------------------------------------------------------------

struct BdArgs {
  std::string anchor, test, interpolator = "akima", format = "text";
};

int run_bd(const BdArgs& args) {
  const auto anchor = bd::read_curve_csv(args.anchor);
  const auto test = bd::read_curve_csv(args.test);
  const auto r = bd::bd_compare(anchor, test, bd::parse_interpolator(args.interpolator));
  if (args.format == "json") {
    emit_json({{"anchor", anchor.label()},
               {"test", test.label()},
               {"interpolator", bd::to_string(r.interpolator)},
               {"bd_rate_percent", round6(r.bd_rate)},
               {"bd_quality", round6(r.bd_quality)},
               {"rate_overlap", {round6(r.rate_overlap.first), round6(r.rate_overlap.second)}},
               {"quality_overlap",
                {round6(r.quality_overlap.first), round6(r.quality_overlap.second)}}});
  } else if (args.format == "csv") {
    std::cout << "anchor,test,interpolator,bd_rate_percent,bd_quality,rate_lo,rate_hi,quality_lo,"
                 "quality_hi\n"
              << anchor.label() << ',' << test.label() << ',' << bd::to_string(r.interpolator)
              << ',' << fmt6(r.bd_rate) << ',' << fmt6(r.bd_quality) << ','
              << fmt6(r.rate_overlap.first) << ',' << fmt6(r.rate_overlap.second) << ','
              << fmt6(r.quality_overlap.first) << ',' << fmt6(r.quality_overlap.second) << '\n';
  } else {
    std::cout << "anchor: " << anchor.label() << "  test: " << test.label()
              << "  interpolator: " << bd::to_string(r.interpolator) << '\n'
              << "BD-rate: " << fmt6(r.bd_rate) << " %\n"
              << "BD-quality: " << fmt6(r.bd_quality) << '\n'
              << "rate overlap: [" << fmt6(r.rate_overlap.first) << ", "
              << fmt6(r.rate_overlap.second) << "]\n"
              << "quality overlap: [" << fmt6(r.quality_overlap.first) << ", "
              << fmt6(r.quality_overlap.second) << "]\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  int rows = 64, cols = 64, seeds = 5, threads = 1;
  std::vector<int> ranks{4};
  std::uint64_t seed = 0;
  ExpressivityOptions options;
  std::string format = "text";
};

int run_fit(const FitArgs& args) {
  ExpressivityOptions options = args.options;
  options.threads = args.threads;
  const auto rows =
      expressivity_report(args.rows, args.cols, args.ranks, seed_range(args.seed, args.seeds), options);
  if (args.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"rank", r.rank},
                     {"seed", r.seed},
                     {"flavor", to_string(r.flavor)},
                     {"final_loss", round6(r.final_loss)},
                     {"stable_rank", round6(r.stable_rank)},
                     {"iters", r.iterations}});
    }
    emit_json(arr);
  } else if (args.format == "csv") {
    write_expressivity_csv(std::cout, rows);
  } else {
    // Rows come in plain/sine pairs per (rank, seed).
    std::map<int, std::array<double, 3>> by_rank;  // plain loss, sine loss, sine wins
    std::map<int, int> count;
    for (std::size_t k = 0; k + 1 < rows.size(); k += 2) {
      auto& acc = by_rank[rows[k].rank];
      acc[0] += rows[k].final_loss;
      acc[1] += rows[k + 1].final_loss;
      acc[2] += rows[k + 1].final_loss < rows[k].final_loss;
      ++count[rows[k].rank];
    }
    for (const auto& [rank, acc] : by_rank) {
      const double n = count[rank];
      std::cout << "rank " << rank << ": mean final loss plain " << fmt6(acc[0] / n) << ", sine "
                << fmt6(acc[1] / n) << "; sine lower in " << static_cast<int>(acc[2]) << "/"
                << count[rank] << " seeds\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct InfoArgs {
  std::string input, format = "text";
};

int run_info(const InfoArgs& args) {
  const auto bytes = codec::read_file(args.input);
  json report;
  report["bytes"] = bytes.size();
  if (bytes.size() >= 4 && std::equal(codec::kCompressedMagic.begin(),
                                      codec::kCompressedMagic.end(), bytes.begin())) {
    const auto adapter = codec::read_compressed(bytes);
    report["kind"] = "compressed";
    report["bits"] = adapter.metadata.bits;
    report["flavor"] = to_string(adapter.metadata.flavor);
    report["omega"] = round6(adapter.metadata.omega);
    report["gamma_multiplier"] = round6(adapter.metadata.gamma_multiplier);
    report["tensors"] = json::array();
    for (const auto& t : adapter.tensors) {
      const double entropy = codec::index_entropy(t.tensor);
      report["tensors"].push_back({{"name", t.name},
                                   {"shape", t.tensor.shape},
                                   {"levels", t.tensor.codebook.size()},
                                   {"index_bits", codec::index_width(t.tensor.codebook.size())},
                                   {"entropy_bits", round6(entropy)}});
    }
  } else {
    const auto tensors = codec::read_tensors(bytes);
    report["kind"] = "tensors";
    report["tensors"] = json::array();
    for (const auto& t : tensors) {
      report["tensors"].push_back({{"name", t.name},
                                   {"shape", {t.value.rows(), t.value.cols()}},
                                   {"frobenius", round6(t.value.norm())}});
    }
  }
  if (args.format == "json") {
    emit_json(report);
  } else if (args.format == "csv") {
    std::cout << "name,shape,levels,entropy_bits,frobenius\n";
    for (const auto& t : report["tensors"]) {
      std::string shape;
      for (const auto& d : t["shape"]) shape += (shape.empty() ? "" : "x") + d.dump();
      std::cout << t["name"].get<std::string>() << ',' << shape << ',';
      if (t.contains("levels")) {
        std::cout << t["levels"].get<std::size_t>() << ','
                  << fmt6(t["entropy_bits"].get<double>()) << ",\n";
      } else {
        std::cout << ",," << fmt6(t["frobenius"].get<double>()) << '\n';
      }
    }
  } else {
    std::cout << report["kind"].get<std::string>() << " container, " << bytes.size() << " bytes";
    if (report["kind"] == "compressed") {
      std::cout << ", " << report["bits"].get<int>() << " bits, flavor "
                << report["flavor"].get<std::string>() << ", omega "
                << fmt6(report["omega"].get<double>());
    }
    std::cout << '\n';
    for (const auto& t : report["tensors"]) {
      std::cout << "  " << t["name"].get<std::string>() << " " << t["shape"].dump();
      if (t.contains("levels")) {
        std::cout << " levels=" << t["levels"].get<std::size_t>()
                  << " entropy=" << fmt6(t["entropy_bits"].get<double>());
      } else {
        std::cout << " |T|_F=" << fmt6(t["frobenius"].get<double>());
      }
      std::cout << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank adapter delta compression toolkit"};
  app.require_subcommand(1);
  const auto formats = CLI::IsMember({"text", "json", "csv"});
  const auto flavors = CLI::IsMember({"plain", "sine"});

  QuantizeArgs q;
  auto* quantize = app.add_subcommand("quantize", "Quantize a raw tensor container");
  quantize->add_option("--input", q.input, "Raw tensor container (ADLT)")->required();
  quantize->add_option("--output", q.output, "Compressed container to write (SLDQ)")->required();
  quantize->add_option("--bits", q.bits, "Bits per parameter")->required()->check(CLI::Range(1, 16));
  quantize->add_option("--flavor", q.flavor, "Adapter flavor recorded in the container")
      ->check(flavors);
  quantize->add_option("--omega", q.omega, "Sine frequency recorded in the container");
  quantize->add_option("--gamma-multiplier", q.gamma_multiplier, "gamma = multiplier * sqrt(n)");
  quantize->add_option("--threads", q.threads)->check(CLI::PositiveNumber);
  quantize->add_option("--format", q.format)->check(formats);

  ReconstructArgs r;
  auto* reconstruct = app.add_subcommand("reconstruct", "Rebuild per-layer weight deltas");
  reconstruct->add_option("--input", r.input, "Compressed container (SLDQ)")->required();
  reconstruct->add_option("--output", r.output, "Raw tensor container of deltas")->required();
  reconstruct->add_option("--flavor", r.flavor, "Override the stored flavor")->check(flavors);
  reconstruct->add_option("--omega", r.omega, "Override the stored omega");
  reconstruct->add_option("--gamma-multiplier", r.gamma_multiplier, "Override the stored multiplier");
  reconstruct->add_option("--format", r.format)->check(formats);

  SweepArgs s;
  auto* sweep = app.add_subcommand("sweep", "Stable-rank sweep over rank, omega and bits");
  sweep->add_option("--rows", s.rows)->check(CLI::PositiveNumber);
  sweep->add_option("--cols", s.cols)->check(CLI::PositiveNumber);
  sweep->add_option("--ranks", s.ranks)->delimiter(',');
  sweep->add_option("--omegas", s.omegas, "Default: 13-point log grid over [1, 1000]")->delimiter(',');
  sweep->add_option("--bits", s.bits, "Bit widths, 'full' for no quantization")->delimiter(',');
  sweep->add_option("--seeds", s.seeds, "Number of seeds")->check(CLI::NonNegativeNumber);
  sweep->add_option("--seed", s.seed, "First seed");
  sweep->add_option("--threads", s.threads)->check(CLI::PositiveNumber);
  sweep->add_option("--format", s.format)->check(formats);
  sweep->add_option("--output", s.output, "Write results here instead of stdout");

  VerifyArgs v;
  auto* verify = app.add_subcommand("verify-theorem", "Check the quantized stable-rank bounds");
  verify->add_option("--rows", v.rows)->check(CLI::PositiveNumber);
  verify->add_option("--cols", v.cols)->check(CLI::PositiveNumber);
  verify->add_option("--bits", v.bits)->check(CLI::Range(1, 16));
  verify->add_option("--seeds", v.seeds)->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", v.seed);
  verify->add_option("--sigma-max", v.sigma_max, "Largest singular value after rescaling")
      ->check(CLI::PositiveNumber);
  verify->add_option("--threads", v.threads)->check(CLI::PositiveNumber);
  verify->add_option("--format", v.format)->check(formats);

  BdArgs b;
  auto* bdcmd = app.add_subcommand("bd", "Bjontegaard delta between two rate-quality curves");
  bdcmd->add_option("--anchor", b.anchor, "CSV with rate,quality columns")->required();
  bdcmd->add_option("--test", b.test, "CSV with rate,quality columns")->required();
  bdcmd->add_option("--interpolator", b.interpolator)->check(CLI::IsMember({"akima", "cubic"}));
  bdcmd->add_option("--format", b.format)->check(formats);

  FitArgs f;
  auto* fitcmd = app.add_subcommand("fit", "Fit plain and sine adapters to random full-rank targets");
  fitcmd->add_option("--rows", f.rows)->check(CLI::PositiveNumber);
  fitcmd->add_option("--cols", f.cols)->check(CLI::PositiveNumber);
  fitcmd->add_option("--ranks", f.ranks)->delimiter(',');
  fitcmd->add_option("--seeds", f.seeds)->check(CLI::NonNegativeNumber);
  fitcmd->add_option("--seed", f.seed);
  fitcmd->add_option("--omega", f.options.omega);
  fitcmd->add_option("--gamma-multiplier", f.options.gamma_multiplier);
  fitcmd->add_option("--learning-rate", f.options.learning_rate)->check(CLI::PositiveNumber);
  fitcmd->add_option("--iterations", f.options.iterations)->check(CLI::NonNegativeNumber);
  fitcmd->add_option("--target-rms", f.options.target_rms_over_bound,
                     "Target RMS entry in units of 1/gamma");
  fitcmd->add_option("--threads", f.threads)->check(CLI::PositiveNumber);
  fitcmd->add_option("--format", f.format)->check(formats);

  InfoArgs i;
  auto* info = app.add_subcommand("info", "Describe and validate a container file");
  info->add_option("--input", i.input)->required();
  info->add_option("--format", i.format)->check(formats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*quantize) return run_quantize(q);
    if (*reconstruct) return run_reconstruct(r);
    if (*sweep) return run_sweep(s);
    if (*verify) return run_verify(v);
    if (*bdcmd) return run_bd(b);
    if (*fitcmd) return run_fit(f);
    if (*info) return run_info(i);
  } catch (const CorruptData& e) {
    std::cerr << "corrupt data: " << e.what() << '\n';
    return kExitCorrupt;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DomainError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
