// Copyright 2026 The deltaq Authors
// SPDX-License-Identifier: Apache-2.0

#include "deltaq/bd_metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "deltaq/errors.hpp"

namespace deltaq::bd {
namespace {

void require_knots(std::span<const double> xs, std::span<const double> ys, std::size_t minimum,
                   const char* who, bool increasing = true) {
  if (xs.size() != ys.size()) {
    throw InvalidInput(std::string(who) + ": xs and ys differ in length");
  }
  if (xs.size() < minimum) {
    throw InvalidInput(std::string(who) + ": need at least " + std::to_string(minimum) +
                       " points, got " + std::to_string(xs.size()));
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw InvalidInput(std::string(who) + ": non-finite point");
    }
    if (increasing && i > 0 && !(xs[i - 1] < xs[i])) {
      throw InvalidInput(std::string(who) + ": xs must be strictly increasing");
    }
  }
}

PiecewiseCubic interpolate(Interpolator kind, std::span<const double> xs,
                           std::span<const double> ys) {
  return kind == Interpolator::Akima ? akima_interpolate(xs, ys) : cubic_fit_interpolate(xs, ys);
}

// (integral of test - integral of anchor) / width over [lo, hi].
double mean_gap(Interpolator kind, const std::vector<double>& xa, const std::vector<double>& ya,
                const std::vector<double>& xt, const std::vector<double>& yt,
                std::pair<double, double>& overlap) {
  const double lo = std::max(xa.front(), xt.front());
  const double hi = std::min(xa.back(), xt.back());
  if (!(lo < hi)) throw DomainError("curves do not overlap; BD is undefined");
  overlap = {lo, hi};
  const double anchor = interpolate(kind, xa, ya).integrate(lo, hi);
  const double test = interpolate(kind, xt, yt).integrate(lo, hi);
  return (test - anchor) / (hi - lo);
}

void rate_axis(const RDCurve& curve, std::vector<double>& log_rate, std::vector<double>& quality) {
  for (const auto& p : curve.points()) {
    log_rate.push_back(std::log10(p.rate));
    quality.push_back(p.quality);
  }
}

// Inverts the curve to log10 rate as a function of quality.
void quality_axis(const RDCurve& curve, std::vector<double>& quality,
                  std::vector<double>& log_rate) {
  rate_axis(curve, log_rate, quality);
  if (quality.back() < quality.front()) {
    std::reverse(quality.begin(), quality.end());
    std::reverse(log_rate.begin(), log_rate.end());
  }
  for (std::size_t i = 1; i < quality.size(); ++i) {
    if (!(quality[i - 1] < quality[i])) {
      throw DomainError("curve '" + curve.label() +
                        "' is not strictly monotone in quality; BD-rate needs an invertible curve");
    }
  }
}

}  // namespace

double CubicPiece::operator()(double x) const {
  const double t = x - origin;
  return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
}

double CubicPiece::integrate(double a, double b) const {
  const auto antiderivative = [this](double x) {
    const double t = x - origin;
    return t * (c[0] + t * (c[1] / 2.0 + t * (c[2] / 3.0 + t * c[3] / 4.0)));
  };
  return antiderivative(b) - antiderivative(a);
}

PiecewiseCubic::PiecewiseCubic(std::vector<double> breaks, std::vector<CubicPiece> pieces)
    : breaks_(std::move(breaks)), pieces_(std::move(pieces)) {
  if (breaks_.size() != pieces_.size() + 1 || pieces_.empty()) {
    throw InvalidInput("PiecewiseCubic: need one more breakpoint than pieces");
  }
}

std::size_t PiecewiseCubic::piece_index(double x) const {
  const auto it = std::upper_bound(breaks_.begin() + 1, breaks_.end() - 1, x);
  return static_cast<std::size_t>(it - (breaks_.begin() + 1));
}

double PiecewiseCubic::operator()(double x) const {
  return pieces_[piece_index(x)](x);
}

double PiecewiseCubic::integrate(double a, double b) const {
  if (a == b) return 0.0;
  if (b < a) return -integrate(b, a);
  double total = 0.0;
  const std::size_t first = piece_index(a);
  const std::size_t last = piece_index(b);
  for (std::size_t i = first; i <= last; ++i) {
    const double lo = i == first ? a : breaks_[i];
    const double hi = i == last ? b : breaks_[i + 1];
    total += pieces_[i].integrate(lo, hi);
  }
  return total;
}

PiecewiseCubic akima_interpolate(std::span<const double> xs, std::span<const double> ys) {
  require_knots(xs, ys, 4, "akima_interpolate");
  const std::size_t n = xs.size();

  // Secants padded with two linearly extrapolated values per side:
  // m[2 .. n] are the n-1 data secants.
  std::vector<double> m(n + 3);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    m[i + 2] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
  }
  m[1] = 2.0 * m[2] - m[3];
  m[0] = 2.0 * m[1] - m[2];
  m[n + 1] = 2.0 * m[n] - m[n - 1];
  m[n + 2] = 2.0 * m[n + 1] - m[n];

  std::vector<double> dm(n + 2);
  for (std::size_t i = 0; i + 1 < m.size(); ++i) dm[i] = std::abs(m[i + 1] - m[i]);

  std::vector<double> f1(n), f2(n), f12(n);
  double f12_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f1[i] = dm[i + 2];
    f2[i] = dm[i];
    f12[i] = f1[i] + f2[i];
    f12_max = std::max(f12_max, f12[i]);
  }
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Weights vanish when the secants pair up on both sides (m0 == m1 and
    // m2 == m3); the slope then is the mean of the outer secants.
    if (f12[i] > 1e-9 * f12_max) {
      t[i] = (f1[i] * m[i + 1] + f2[i] * m[i + 2]) / f12[i];
    } else {
      t[i] = 0.5 * (m[i] + m[i + 3]);
    }
  }

  std::vector<CubicPiece> pieces(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = xs[i + 1] - xs[i];
    const double slope = m[i + 2];
    pieces[i].origin = xs[i];
    pieces[i].c = {ys[i], t[i], (3.0 * slope - 2.0 * t[i] - t[i + 1]) / h,
                   (t[i] + t[i + 1] - 2.0 * slope) / (h * h)};
  }
  return PiecewiseCubic(std::vector<double>(xs.begin(), xs.end()), std::move(pieces));
}

PiecewiseCubic cubic_fit_interpolate(std::span<const double> xs, std::span<const double> ys) {
  // Any order and repeated xs are accepted; a rank-deficient design is the
  // failure mode.
  require_knots(xs, ys, 4, "cubic_fit_interpolate", false);
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd design(n, 4);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = xs[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = x;
    design(i, 2) = x * x;
    design(i, 3) = x * x * x;
    rhs(i) = ys[static_cast<std::size_t>(i)];
  }
  // Column scaling keeps the Vandermonde system well conditioned.
  const Eigen::VectorXd scale = design.colwise().norm().transpose();
  if (!(scale.minCoeff() > 0.0) || !scale.allFinite()) {
    throw NumericError("cubic_fit_interpolate: degenerate design matrix");
  }
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-12);
  if (qr.rank() < 4) throw NumericError("cubic_fit_interpolate: degenerate design matrix");
  const Eigen::VectorXd coef = qr.solve(rhs).cwiseQuotient(scale);

  CubicPiece piece;
  piece.origin = 0.0;
  piece.c = {coef(0), coef(1), coef(2), coef(3)};
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return PiecewiseCubic({*lo, *hi}, {piece});
}

const char* to_string(Interpolator interpolator) {
  return interpolator == Interpolator::Akima ? "akima" : "cubic";
}

Interpolator parse_interpolator(const std::string& text) {
  if (text == "akima") return Interpolator::Akima;
  if (text == "cubic") return Interpolator::CubicFit;
  throw InvalidInput("unknown interpolator '" + text + "' (expected akima or cubic)");
}

RDCurve::RDCurve(std::string label, std::vector<RDPoint> points)
    : label_(std::move(label)), points_(std::move(points)) {
  if (points_.size() < 4) {
    throw InvalidInput("curve '" + label_ + "': need at least 4 points, got " +
                       std::to_string(points_.size()));
  }
  for (const auto& p : points_) {
    if (!std::isfinite(p.rate) || !std::isfinite(p.quality) || !(p.rate > 0.0)) {
      throw InvalidInput("curve '" + label_ + "': rates must be positive and finite");
    }
  }
  std::sort(points_.begin(), points_.end(),
            [](const RDPoint& a, const RDPoint& b) { return a.rate < b.rate; });
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i - 1].rate == points_[i].rate) {
      throw InvalidInput("curve '" + label_ + "': duplicate rate");
    }
  }
}

double bd_quality(const RDCurve& anchor, const RDCurve& test, Interpolator interpolator) {
  std::vector<double> xa, ya, xt, yt;
  rate_axis(anchor, xa, ya);
  rate_axis(test, xt, yt);
  std::pair<double, double> overlap;
  return mean_gap(interpolator, xa, ya, xt, yt, overlap);
}

double bd_rate(const RDCurve& anchor, const RDCurve& test, Interpolator interpolator) {
  std::vector<double> qa, ra, qt, rt;
  quality_axis(anchor, qa, ra);
  quality_axis(test, qt, rt);
  std::pair<double, double> overlap;
  const double mean_log_gap = mean_gap(interpolator, qa, ra, qt, rt, overlap);
  return (std::pow(10.0, mean_log_gap) - 1.0) * 100.0;
}

BDResult bd_compare(const RDCurve& anchor, const RDCurve& test, Interpolator interpolator) {
  BDResult r;
  r.interpolator = interpolator;

  std::vector<double> xa, ya, xt, yt;
  rate_axis(anchor, xa, ya);
  rate_axis(test, xt, yt);
  std::pair<double, double> log_overlap;
  r.bd_quality = mean_gap(interpolator, xa, ya, xt, yt, log_overlap);
  r.rate_overlap = {std::pow(10.0, log_overlap.first), std::pow(10.0, log_overlap.second)};

  std::vector<double> qa, ra, qt, rt;
  quality_axis(anchor, qa, ra);
  quality_axis(test, qt, rt);
  r.bd_rate = (std::pow(10.0, mean_gap(interpolator, qa, ra, qt, rt, r.quality_overlap)) - 1.0) *
              100.0;
  return r;
}

RDCurve read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");

  const auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell.erase(0, cell.find_first_not_of(" \t\r"));
      cell.erase(cell.find_last_not_of(" \t\r") + 1);
      cells.push_back(cell);
    }
    return cells;
  };

  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("'" + path.string() + "' is empty");
  const auto header = split(line);
  const auto column = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw InvalidInput("'" + path.string() + "' has no '" + name + "' column");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t rate_col = column("rate");
  const std::size_t quality_col = column("quality");

  std::vector<RDPoint> points;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    const auto parse = [&](std::size_t col) {
      if (col >= cells.size()) {
        throw InvalidInput(path.string() + ":" + std::to_string(line_no) + ": missing column");
      }
      double v = 0.0;
      const auto& s = cells[col];
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InvalidInput(path.string() + ":" + std::to_string(line_no) + ": bad number '" + s +
                           "'");
      }
      return v;
    };
    points.push_back({parse(rate_col), parse(quality_col)});
  }
  return RDCurve(path.stem().string(), std::move(points));
}

}  // namespace deltaq::bd
