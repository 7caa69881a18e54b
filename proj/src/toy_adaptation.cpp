// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#include "deltaq/toy_adaptation.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>

#include "deltaq/parallel.hpp"

namespace deltaq {

FitReport fit(const FitConfig& config) {
  const Matrix& target = config.target;
  require_finite(target, "fit target");
  if (config.rank < 1 || config.rank > std::min(target.rows(), target.cols())) {
    throw InvalidInput("fit: rank must be in [1, min(m, n)]");
  }
  if (!(config.learning_rate > 0.0)) throw InvalidInput("fit: learning rate must be positive");
  if (!(config.gamma > 0.0)) throw InvalidInput("fit: gamma must be positive");
  if (config.iterations < 0) throw InvalidInput("fit: negative iteration budget");

  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(config.seed);
  FitReport report;
  report.a = gaussian_matrix(target.rows(), config.rank,
                             1.0 / std::sqrt(static_cast<double>(config.rank)), rng);
  report.b = Matrix::Zero(config.rank, target.cols());

  auto current =
      loss_and_gradients(report.a, report.b, target, config.flavor, config.omega, config.gamma);
  report.trajectory.push_back(current.loss);

  double step = config.learning_rate;
  for (int it = 0; it < config.iterations; ++it) {
    if (current.grad_a.isZero(0) && current.grad_b.isZero(0)) break;
    bool accepted = false;
    for (int halving = 0; halving <= 20; ++halving) {
      Matrix a = report.a - step * current.grad_a;
      Matrix b = report.b - step * current.grad_b;
      auto next = loss_and_gradients(a, b, target, config.flavor, config.omega, config.gamma);
      if (std::isnan(next.loss)) {
        throw NumericError("fit: loss became NaN at iteration " + std::to_string(it),
                           static_cast<double>(it));
      }
      if (next.loss <= current.loss) {
        report.a = std::move(a);
        report.b = std::move(b);
        current = std::move(next);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      report.stalled = true;
      break;
    }
    report.trajectory.push_back(current.loss);
    ++report.iterations;
  }

  report.final_loss = current.loss;
  const Matrix delta =
      activate(Matrix(report.a * report.b), config.flavor, config.omega, config.gamma);
  report.stable_rank = delta.isZero(0) ? 0.0 : stable_rank(delta);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Matrix orthogonal_target(Eigen::Index rows, Eigen::Index cols, double target_rms,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const bool tall = rows >= cols;
  const Matrix g = tall ? gaussian_matrix(rows, cols, 1.0, rng) : gaussian_matrix(cols, rows, 1.0, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
  // Fix column signs so the draw is a deterministic function of g.
  const Matrix r = qr.matrixQR().topRows(g.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  Matrix out = tall ? q : Matrix(q.transpose());
  out *= target_rms * std::sqrt(static_cast<double>(rows * cols)) / out.norm();
  return out;
}

std::vector<ExpressivityRow> expressivity_report(Eigen::Index rows, Eigen::Index cols,
                                                 const std::vector<int>& ranks,
                                                 const std::vector<std::uint64_t>& seeds,
                                                 const ExpressivityOptions& options) {
  for (int k : ranks) {
    if (k < 1 || k > std::min(rows, cols)) {
      throw InvalidInput("expressivity_report: rank " + std::to_string(k) + " outside [1, min(m, n)]");
    }
  }
  const double gamma = default_gamma(cols, options.gamma_multiplier);
  const double target_rms = options.target_rms_over_bound / gamma;

  std::vector<Matrix> targets;
  for (auto seed : seeds) targets.push_back(orthogonal_target(rows, cols, target_rms, seed));

  std::vector<ExpressivityRow> out(ranks.size() * seeds.size() * 2);
  parallel_for(out.size(), options.threads, [&](std::size_t i) {
    const std::size_t ri = i / (seeds.size() * 2);
    const std::size_t si = (i / 2) % seeds.size();
    const Flavor flavor = i % 2 == 0 ? Flavor::Plain : Flavor::Sine;

    FitConfig config;
    config.target = targets[si];
    config.rank = ranks[ri];
    config.flavor = flavor;
    config.omega = options.omega;
    config.gamma = gamma;
    config.learning_rate = options.learning_rate;
    config.iterations = options.iterations;
    config.seed = seeds[si];
    const FitReport report = fit(config);

    out[i] = {ranks[ri], seeds[si], flavor, report.final_loss, report.stable_rank,
              report.iterations};
  });
  return out;
}

void write_expressivity_csv(std::ostream& out, const std::vector<ExpressivityRow>& rows) {
  out << "rank,seed,flavor,final_loss,stable_rank,iters\n";
  const auto precision = out.precision();
  out << std::setprecision(6);
  for (const auto& r : rows) {
    out << r.rank << ',' << r.seed << ',' << to_string(r.flavor) << ',' << r.final_loss << ','
        << r.stable_rank << ',' << r.iterations << '\n';
  }
  out.precision(precision);
}

}  // namespace deltaq
