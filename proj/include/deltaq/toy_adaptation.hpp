// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "deltaq/adapter.hpp"
#include "deltaq/tensor_core.hpp"

namespace deltaq {

template <typename Scalar>
struct LossAndGradients {
  Scalar loss = Scalar(0);
  MatrixX<Scalar> grad_a;
  MatrixX<Scalar> grad_b;
};

/// Squared Frobenius error of the reconstructed delta against `target` and
/// its exact gradients with respect to both factors.
///
/// With P = A B and R = delta(P) - target, the upstream gradient is
/// G = 2 R (Plain) or G = 2 R * (omega / gamma) cos(omega P) (Sine), and
/// dA = G B^T, dB = A^T G.
template <typename Scalar>
LossAndGradients<Scalar> loss_and_gradients(const MatrixX<Scalar>& a, const MatrixX<Scalar>& b,
                                            const MatrixX<Scalar>& target, Flavor flavor,
                                            Scalar omega, Scalar gamma) {
  if (a.cols() != b.rows() || a.rows() != target.rows() || b.cols() != target.cols()) {
    throw InvalidInput("loss_and_gradients: shapes do not compose");
  }
  const MatrixX<Scalar> product = a * b;
  const MatrixX<Scalar> residual = activate(product, flavor, omega, gamma) - target;

  MatrixX<Scalar> upstream;
  if (flavor == Flavor::Sine) {
    upstream = (Scalar(2) * (omega / gamma) * residual.array() * (omega * product.array()).cos())
                   .matrix();
  } else {
    upstream = Scalar(2) * residual;
  }

  LossAndGradients<Scalar> out;
  out.loss = residual.squaredNorm();
  out.grad_a.noalias() = upstream * b.transpose();
  out.grad_b.noalias() = a.transpose() * upstream;
  return out;
}

struct FitConfig {
  Matrix target;
  int rank = 4;
  Flavor flavor = Flavor::Sine;
  double omega = kDefaultOmega;
  double gamma = 1.0;
  double learning_rate = 0.1;
  int iterations = 1000;
  std::uint64_t seed = 0;
};

struct FitReport {
  double final_loss = 0.0;
  std::vector<double> trajectory;  // loss after every accepted step, starting at the initial loss
  double stable_rank = 0.0;        // 0 when the fitted delta is exactly zero
  int iterations = 0;              // accepted steps
  bool stalled = false;            // 20 halvings failed to decrease the loss
  double wall_seconds = 0.0;
  Matrix a;
  Matrix b;
};

/// Gradient descent from A ~ N(0, 1/k), B = 0. A step that increases the
/// loss is retried with half the learning rate, up to 20 times; the reduced
/// rate is kept for later steps.
FitReport fit(const FitConfig& config);

struct ExpressivityOptions {
  double omega = kDefaultOmega;
  double gamma_multiplier = 1.0;
  double learning_rate = 0.1;
  int iterations = 1000;
  /// RMS entry of the target in units of the sine output bound 1/gamma.
  double target_rms_over_bound = 2.0;
  int threads = 1;
};

struct ExpressivityRow {
  int rank = 0;
  std::uint64_t seed = 0;
  Flavor flavor = Flavor::Plain;
  double final_loss = 0.0;
  double stable_rank = 0.0;
  int iterations = 0;
};

/// Random full-rank target: a Haar-like orthonormal m x n matrix rescaled so
/// its RMS entry equals target_rms.
Matrix orthogonal_target(Eigen::Index rows, Eigen::Index cols, double target_rms,
                         std::uint64_t seed);

/// Fits both flavors at every rank to one target per seed.
/// Rows ordered by (rank, seed, flavor) with Plain first.
std::vector<ExpressivityRow> expressivity_report(Eigen::Index rows, Eigen::Index cols,
                                                 const std::vector<int>& ranks,
                                                 const std::vector<std::uint64_t>& seeds,
                                                 const ExpressivityOptions& options = {});

/// CSV header: rank,seed,flavor,final_loss,stable_rank,iters
void write_expressivity_csv(std::ostream& out, const std::vector<ExpressivityRow>& rows);

}  // namespace deltaq
