// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "deltaq/errors.hpp"

namespace deltaq {

/// Dense row-major matrix, the numeric carrier used throughout the library.
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what = "matrix") {
  if (!m.allFinite()) {
    throw InvalidInput(std::string(what) + " contains non-finite entries");
  }
}

template <typename Derived>
typename Derived::Scalar frobenius_norm(const Eigen::MatrixBase<Derived>& m) {
  require_finite(m);
  return m.norm();
}

struct PowerIterationOptions {
  double relative_tolerance = 1e-10;
  int max_iterations = 10000;
  std::uint64_t seed = 0x5eedULL;
};

namespace detail {

// Gram matrix over the smaller dimension; its top eigenvalue is sigma_max^2.
template <typename Derived>
auto small_gram(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> gram;
  if (m.rows() >= m.cols()) {
    gram.noalias() = m.transpose() * m;
  } else {
    gram.noalias() = m * m.transpose();
  }
  return gram;
}

}  // namespace detail

/// Largest singular value by power iteration on the Gram matrix of the smaller
/// dimension. Convergence is judged on the Rayleigh quotient only, so
/// degenerate top singular values still converge in value.
template <typename Derived>
typename Derived::Scalar sigma_max(const Eigen::MatrixBase<Derived>& m,
                                   const PowerIterationOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  require_finite(m);
  if (m.size() == 0 || m.isZero(0)) return Scalar(0);

  const MatrixX<Scalar> gram = detail::small_gram(m);
  const Eigen::Index dim = gram.rows();

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uniform(0.5, 1.5);
  VectorX<Scalar> v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Scalar(uniform(rng));
  v.normalize();

  const Scalar tol = std::max(Scalar(opts.relative_tolerance),
                              Scalar(16) * std::numeric_limits<Scalar>::epsilon());
  Scalar lambda = Scalar(0);
  VectorX<Scalar> w(dim);
  for (int it = 0; it < opts.max_iterations; ++it) {
    w.noalias() = gram * v;
    const Scalar next = v.dot(w);
    const Scalar wn = w.norm();
    if (wn == Scalar(0)) return Scalar(0);
    v = w / wn;
    if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) {
      // One more Rayleigh quotient on the updated vector costs a product and
      // squares the remaining vector error.
      w.noalias() = gram * v;
      return std::sqrt(std::max(std::max(next, v.dot(w)), Scalar(0)));
    }
    lambda = next;
  }
  throw NumericError("sigma_max: power iteration did not converge",
                     static_cast<double>(std::sqrt(std::max(lambda, Scalar(0)))));
}

template <typename Scalar>
struct SingularExtremes {
  Scalar min = Scalar(0);
  Scalar max = Scalar(0);
};

/// Smallest and largest of the min(rows, cols) singular values from one dense
/// eigendecomposition of the smaller Gram matrix. No iteration budget, so it
/// suits noise-like spectra where power iteration crawls. sigma_max is
/// accurate to a few ulps relative; sigma_min to roughly sqrt(eps) * sigma_max.
template <typename Derived>
SingularExtremes<typename Derived::Scalar> singular_extremes(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require_finite(m);
  if (m.size() == 0) return {};
  const MatrixX<Scalar> gram = detail::small_gram(m);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("singular_extremes: eigen solver failed");
  }
  const auto& ev = solver.eigenvalues();  // ascending
  return {std::sqrt(std::max(ev(0), Scalar(0))), std::sqrt(std::max(ev(ev.size() - 1), Scalar(0)))};
}

/// Smallest of the min(rows, cols) singular values.
template <typename Derived>
typename Derived::Scalar sigma_min(const Eigen::MatrixBase<Derived>& m) {
  return singular_extremes(m).min;
}

/// ||m||_F^2 / sigma_max(m)^2. Lies in [1, min(rows, cols)] for nonzero m.
template <typename Derived>
typename Derived::Scalar stable_rank(const Eigen::MatrixBase<Derived>& m,
                                     const PowerIterationOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  const Scalar top = sigma_max(m, opts);
  if (top == Scalar(0)) {
    throw DomainError("stable_rank: matrix is all zero (sigma_max = 0)");
  }
  return m.squaredNorm() / (top * top);
}

template <typename DerivedA, typename DerivedB>
MatrixX<typename DerivedA::Scalar> matmul(const Eigen::MatrixBase<DerivedA>& a,
                                          const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.rows()) {
    throw InvalidInput("matmul: shape mismatch (" + std::to_string(a.rows()) + "x" +
                       std::to_string(a.cols()) + " times " + std::to_string(b.rows()) + "x" +
                       std::to_string(b.cols()) + ")");
  }
  require_finite(a, "left operand");
  require_finite(b, "right operand");
  MatrixX<typename DerivedA::Scalar> out;
  out.noalias() = a * b;
  return out;
}

/// Matrix with i.i.d. N(0, stddev^2) entries drawn from `rng`.
template <typename Scalar = double, typename Rng>
MatrixX<Scalar> gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  MatrixX<Scalar> out(rows, cols);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = Scalar(normal(rng));
  return out;
}

}  // namespace deltaq
