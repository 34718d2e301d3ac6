#pragma once
// Independent reference values for the tests: adaptive Gauss-Kronrod quadrature
// from Boost.Math applied directly to the defining integrals.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using Vec2 = Eigen::Vector2d;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Integral of f over [a, b] with breakpoints; each piece is graded dyadically toward
// the breakpoints so endpoint singularities and near-singular targets are resolved.
inline double integrate(const std::function<double(double)>& f, double a, double b, std::vector<double> breaks = {},
                        double tol = 1e-14) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  auto gk = [&](double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 8, tol, &err);
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]), hi = std::min(b, breaks[i + 1]);
    if (!(hi > lo)) continue;
    // Grade toward both ends of the piece.
    const double mid = 0.5 * (lo + hi);
    double h = mid - lo;
    double x0 = mid;
    for (int k = 0; k < 60 && h > 1e-300; ++k, h *= 0.5) {
      total += gk(lo + 0.5 * h, x0 == mid ? mid : lo + h);
      x0 = lo + 0.5 * h;
    }
    total += gk(lo, x0);
    h = hi - mid;
    x0 = mid;
    for (int k = 0; k < 60 && h > 1e-300; ++k, h *= 0.5) {
      total += gk(x0 == mid ? mid : hi - h, hi - 0.5 * h);
      x0 = hi - 0.5 * h;
    }
    total += gk(x0, hi);
  }
  return total;
}

// (1/2pi) n(y) . (x - y) / |x - y|^2 with y the source point.
inline double dlp_kernel(const Vec2& y, const Vec2& ny, const Vec2& x) {
  const Vec2 r = x - y;
  return ny.dot(r) / (kTwoPi * r.squaredNorm());
}

// D[s^beta] on the unit segment along the x axis (normal (0, 1)), target t e(theta0).
inline double segment_dlp(double beta, double theta0, double t) {
  const Vec2 x(t * std::cos(theta0), t * std::sin(theta0));
  auto f = [&](double s) { return dlp_kernel(Vec2(s, 0.0), Vec2(0.0, 1.0), x) * std::pow(s, beta); };
  return integrate(f, 0.0, 1.0, {std::clamp(x.x(), 0.0, 1.0)});
}

// n . grad_x S[s^(beta - 1)](x) with S = -(1/2pi) log |x - y| and n = e(theta0 + pi/2).
inline double segment_slp_grad(double beta, double theta0, double t) {
  const Vec2 x(t * std::cos(theta0), t * std::sin(theta0));
  const Vec2 n(-std::sin(theta0), std::cos(theta0));
  auto f = [&](double s) {
    const Vec2 r = x - Vec2(s, 0.0);
    return -n.dot(r) / (kTwoPi * r.squaredNorm()) * std::pow(s, beta - 1.0);
  };
  return integrate(f, 0.0, 1.0, {std::clamp(x.x(), 0.0, 1.0)});
}

// Single layer -(1/2pi) int log|x - y| sigma ds over the segment [a, b].
inline double segment_slp(const Vec2& a, const Vec2& b, const std::function<double(double)>& sigma, const Vec2& x) {
  const double L = (b - a).norm();
  auto f = [&](double s) { return -std::log((x - (a + s * (b - a))).norm()) / kTwoPi * sigma(s) * L; };
  return integrate(f, 0.0, 1.0);
}

// Double layer over the segment [a, b] with normal perp(b - a) = (dy, -dx) / L.
inline double segment_dlp_general(const Vec2& a, const Vec2& b, const std::function<double(double)>& sigma,
                                  const Vec2& x) {
  const Vec2 d = b - a;
  const double L = d.norm();
  const Vec2 n(d.y() / L, -d.x() / L);
  // Breakpoint at the foot of the perpendicular from x.
  const double foot = std::clamp((x - a).dot(d) / (L * L), 0.0, 1.0);
  auto f = [&](double s) { return dlp_kernel(a + s * d, n, x) * sigma(s) * L; };
  return integrate(f, 0.0, 1.0, {foot});
}

}  // namespace oracle
