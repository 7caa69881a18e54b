// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command-line driver: exit codes and output shape.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "deltaq/adapter.hpp"
#include "deltaq/codec.hpp"
#include "deltaq/quantizer.hpp"

namespace fs = std::filesystem;
using namespace deltaq;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(DELTAQ_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("deltaq_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Two layers of rank-4 factors; values are binary32 so they survive storage.
  std::string write_adapter(const std::string& name, bool orphan = false) {
    std::mt19937_64 rng(3);
    std::vector<codec::NamedMatrix> tensors;
    for (const char* layer : {"layer0", "layer1"}) {
      tensors.push_back({std::string(layer) + ".A", gaussian_matrix(24, 4, 0.5, rng)});
      tensors.push_back({std::string(layer) + ".B", gaussian_matrix(4, 16, 0.5, rng)});
    }
    if (orphan) tensors.push_back({"layer7.A", gaussian_matrix(8, 4, 0.5, rng)});
    for (auto& t : tensors) t.value = t.value.cast<float>().cast<double>();
    const std::string p = path(name);
    codec::write_file(p, codec::write_tensors(tensors));
    return p;
  }

  std::string write_curve(const std::string& name, const std::string& body) {
    const std::string p = path(name);
    std::ofstream(p) << body;
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, NoSubcommandIsUsageError) { EXPECT_EQ(run_cli("").status, 2); }

TEST_F(CliTest, UnknownFlagIsUsageError) {
  EXPECT_EQ(run_cli("info --input x --bogus").status, 2);
}

TEST_F(CliTest, MissingInputExitsTwo) {
  EXPECT_EQ(run_cli("quantize --input " + path("absent.bin") + " --output " + path("o.bin") +
                    " --bits 4")
                .status,
            2);
}

TEST_F(CliTest, BitsOutOfRangeExitsTwo) {
  const auto in = write_adapter("a.bin");
  EXPECT_EQ(run_cli("quantize --input " + in + " --output " + path("o.bin") + " --bits 17").status,
            2);
}

TEST_F(CliTest, SixteenBitQuantizeIsLosslessAndSizedAsPredicted) {
  const auto in = write_adapter("a.bin");
  const auto out = path("q.bin");
  const auto r = run_cli("quantize --input " + in + " --output " + out + " --bits 16 --format json");
  ASSERT_EQ(r.status, 0) << r.out;
  std::size_t zeros = 0;
  for (auto pos = r.out.find("\"mse\": 0.0,"); pos != std::string::npos;
       pos = r.out.find("\"mse\": 0.0,", pos + 1)) {
    ++zeros;
  }
  EXPECT_EQ(zeros, 4u) << r.out;

  // File size matches the footprint predicted from the raw tensors.
  const auto tensors = codec::read_tensors(codec::read_file(in));
  AdapterSet set;
  for (std::size_t i = 0; i < tensors.size(); i += 2) {
    AdapterPair<double> pair;
    pair.a = tensors[i].value;
    pair.b = tensors[i + 1].value;
    set.layers[tensors[i].name.substr(0, tensors[i].name.size() - 2)] = pair;
  }
  EXPECT_EQ(fs::file_size(out), memory_footprint(set, Precision::quantized(16)));
}

TEST_F(CliTest, QuantizeReconstructRoundTripMatchesDirectProduct) {
  const auto in = write_adapter("a.bin");
  const auto q = path("q.bin");
  const auto d = path("d.bin");
  ASSERT_EQ(run_cli("quantize --input " + in + " --output " + q + " --bits 16").status, 0);
  ASSERT_EQ(run_cli("reconstruct --input " + q + " --output " + d + " --flavor plain").status, 0);

  const auto raw = codec::read_tensors(codec::read_file(in));
  const auto deltas = codec::read_tensors(codec::read_file(d));
  ASSERT_EQ(deltas.size(), 2u);
  for (std::size_t l = 0; l < deltas.size(); ++l) {
    const Matrix direct = raw[2 * l].value * raw[2 * l + 1].value;
    EXPECT_EQ(deltas[l].name, raw[2 * l].name.substr(0, 6));
    EXPECT_LT((deltas[l].value - direct).norm(), 1e-3 * direct.norm());
  }
}

TEST_F(CliTest, SineReconstructionIsBoundedByInverseGamma) {
  const auto in = write_adapter("a.bin");
  const auto q = path("q.bin");
  const auto d = path("d.bin");
  ASSERT_EQ(run_cli("quantize --input " + in + " --output " + q + " --bits 3").status, 0);
  ASSERT_EQ(run_cli("reconstruct --input " + q + " --output " + d + " --flavor sine --omega 50")
                .status,
            0);
  for (const auto& t : codec::read_tensors(codec::read_file(d))) {
    const double bound = 1.0 / default_gamma(t.value.cols(), 1.0);
    EXPECT_LE(t.value.cwiseAbs().maxCoeff(), bound * (1.0 + 1e-6)) << t.name;
  }
}

TEST_F(CliTest, OrphanTensorExitsTwo) {
  const auto in = write_adapter("a.bin", /*orphan=*/true);
  const auto q = path("q.bin");
  ASSERT_EQ(run_cli("quantize --input " + in + " --output " + q + " --bits 4").status, 0);
  EXPECT_EQ(run_cli("reconstruct --input " + q + " --output " + path("d.bin")).status, 2);
}

TEST_F(CliTest, FlippedByteIsCorrupt) {
  const auto in = write_adapter("a.bin");
  const auto q = path("q.bin");
  ASSERT_EQ(run_cli("quantize --input " + in + " --output " + q + " --bits 4").status, 0);
  ASSERT_EQ(run_cli("info --input " + q).status, 0);

  auto bytes = codec::read_file(q);
  bytes[bytes.size() / 2] ^= 0x10;
  codec::write_file(q, bytes);
  EXPECT_EQ(run_cli("info --input " + q).status, 4);

  // The raw container has no checksum; truncation is still caught.
  auto raw = codec::read_file(in);
  raw.resize(raw.size() - 3);
  codec::write_file(in, raw);
  EXPECT_EQ(run_cli("info --input " + in).status, 4);
}

TEST_F(CliTest, BdOnIdenticalCurvesIsZero) {
  const std::string curve = "rate,quality\n1.0,60.0\n2.0,63.5\n4.0,65.0\n8.0,66.2\n";
  const auto a = write_curve("a.csv", curve);
  const auto b = write_curve("b.csv", curve);
  const auto r = run_cli("bd --anchor " + a + " --test " + b + " --format json");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("\"bd_rate_percent\": 0.0"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"bd_quality\": 0.0"), std::string::npos) << r.out;
}

TEST_F(CliTest, BdWithTooFewPointsIsInputError) {
  const auto a = write_curve("a.csv", "rate,quality\n1,2\n2,3\n");
  EXPECT_EQ(run_cli("bd --anchor " + a + " --test " + a).status, 2);
}

TEST_F(CliTest, BdOnMalformedCsvIsInputError) {
  const auto a = write_curve("a.csv", "rate,quality\n1,2\nabc,3\n4,5\n8,6\n");
  EXPECT_EQ(run_cli("bd --anchor " + a + " --test " + a).status, 2);
}

TEST_F(CliTest, VerifyTheoremReportsHoldsLine) {
  const auto r = run_cli("verify-theorem --seeds 20 --rows 32 --cols 32");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.rfind("holds: 20/20 (preconditions met: ", 0), 0u) << r.out;
}

TEST_F(CliTest, SweepIsDeterministicAndCsvHasHeader) {
  const std::string args = "sweep --seeds 2 --omegas 1,200 --bits 2,full --format csv";
  const auto first = run_cli(args);
  ASSERT_EQ(first.status, 0);
  EXPECT_EQ(first.out.rfind("rank,omega,bits,", 0), 0u);
  EXPECT_EQ(first.out, run_cli(args).out);
}

TEST_F(CliTest, SweepRejectsBadBits) {
  EXPECT_EQ(run_cli("sweep --seeds 1 --bits 0").status, 2);
  EXPECT_EQ(run_cli("sweep --seeds 1 --bits three").status, 2);
}

TEST_F(CliTest, FitTextSummarizesPerRank) {
  const auto r = run_cli("fit --seeds 2 --iterations 50 --rows 16 --cols 16 --ranks 2");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("rank 2: mean final loss plain ", 0), 0u) << r.out;
}

TEST_F(CliTest, FitJsonIsDeterministic) {
  const std::string args = "fit --seeds 2 --iterations 50 --rows 16 --cols 16 --format json";
  const auto first = run_cli(args);
  ASSERT_EQ(first.status, 0);
  EXPECT_EQ(first.out, run_cli(args).out);
}

TEST_F(CliTest, NumbersPrintWithSixSignificantDigits) {
  const auto r = run_cli("sweep --seeds 1 --omegas 3 --bits full --ranks 2 --rows 8 --cols 8 "
                         "--format csv");
  ASSERT_EQ(r.status, 0);
  const auto line = r.out.substr(r.out.find('\n') + 1);
  // sr_plain column: at most six significant digits.
  const auto field = line.substr(line.find(",full,") + 6);
  const auto value = field.substr(0, field.find(','));
  int digits = 0;
  for (char c : value) digits += c >= '0' && c <= '9';
  EXPECT_LE(digits, 7);  // a leading "0." counts one extra
}

}  // namespace
