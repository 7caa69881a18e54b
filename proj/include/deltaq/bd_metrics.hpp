// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace deltaq::bd {

/// c[0] + c[1] t + c[2] t^2 + c[3] t^3 with t = x - origin.
struct CubicPiece {
  double origin = 0.0;
  std::array<double, 4> c{};

  double operator()(double x) const;
  /// Exact integral over [a, b].
  double integrate(double a, double b) const;
};

/// Piecewise cubic on consecutive breakpoints. Evaluation outside the
/// breakpoints extends the first or last piece.
class PiecewiseCubic {
 public:
  PiecewiseCubic(std::vector<double> breaks, std::vector<CubicPiece> pieces);

  double operator()(double x) const;
  double integrate(double a, double b) const;

  double lower() const { return breaks_.front(); }
  double upper() const { return breaks_.back(); }
  const std::vector<CubicPiece>& pieces() const { return pieces_; }

 private:
  std::size_t piece_index(double x) const;

  std::vector<double> breaks_;
  std::vector<CubicPiece> pieces_;
};

/// Akima spline: C1 piecewise cubic through every point, slopes from
/// weighted neighbouring secants, two extrapolated secants at each end.
/// Requires at least four points with strictly increasing xs.
PiecewiseCubic akima_interpolate(std::span<const double> xs, std::span<const double> ys);

/// Least-squares cubic polynomial (exact through four points), returned as a
/// single piece with origin 0 so pieces()[0].c are monomial coefficients.
PiecewiseCubic cubic_fit_interpolate(std::span<const double> xs, std::span<const double> ys);

enum class Interpolator { Akima, CubicFit };

const char* to_string(Interpolator interpolator);
Interpolator parse_interpolator(const std::string& text);

struct RDPoint {
  double rate = 0.0;
  double quality = 0.0;
};

/// Rate-quality curve with at least four points, sorted by strictly
/// increasing rate.
class RDCurve {
 public:
  RDCurve(std::string label, std::vector<RDPoint> points);

  const std::string& label() const { return label_; }
  const std::vector<RDPoint>& points() const { return points_; }

 private:
  std::string label_;
  std::vector<RDPoint> points_;
};

struct BDResult {
  double bd_rate = 0.0;     // percent; negative means the test curve needs less rate
  double bd_quality = 0.0;  // quality units; positive means the test curve is better
  std::pair<double, double> rate_overlap;     // in rate units
  std::pair<double, double> quality_overlap;  // in quality units
  Interpolator interpolator = Interpolator::Akima;
};

/// Mean vertical gap, quality = f(log10 rate), over the shared log-rate range.
double bd_quality(const RDCurve& anchor, const RDCurve& test,
                  Interpolator interpolator = Interpolator::Akima);

/// Mean horizontal gap, log10 rate = g(quality), over the shared quality
/// range, reported as a percentage rate change.
double bd_rate(const RDCurve& anchor, const RDCurve& test,
               Interpolator interpolator = Interpolator::Akima);

BDResult bd_compare(const RDCurve& anchor, const RDCurve& test,
                    Interpolator interpolator = Interpolator::Akima);

/// Reads a CSV with a header containing `rate` and `quality` columns.
RDCurve read_curve_csv(const std::filesystem::path& path);

}  // namespace deltaq::bd
