#include "trijunc/quadrature.hpp"

#include "trijunc/errors.hpp"

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace trijunc {

namespace {

GaussRule make_gauss(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  r.bary.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-like initial guess, then Newton on the Legendre recurrence.
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  // Scale-free barycentric weights for Legendre points.
  for (int i = 0; i < n; ++i) {
    const double s = (i % 2 == 0) ? 1.0 : -1.0;
    r.bary[i] = s * std::sqrt((1.0 - r.nodes[i] * r.nodes[i]) * r.weights[i]);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 200) throw DomainError("quadrature", "gauss_legendre", "order out of range");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<GaussRule>(make_gauss(n))).first;
  return *it->second;
}

void lagrange_basis(const GaussRule& rule, double u, double* out) {
  const int n = static_cast<int>(rule.nodes.size());
  double denom = 0.0;
  for (int j = 0; j < n; ++j) {
    const double diff = u - rule.nodes[j];
    if (diff == 0.0) {
      for (int k = 0; k < n; ++k) out[k] = (k == j) ? 1.0 : 0.0;
      return;
    }
    out[j] = rule.bary[j] / diff;
    denom += out[j];
  }
  for (int j = 0; j < n; ++j) out[j] /= denom;
}

double bernstein_rho(const Vec2& a, const Vec2& b, const Vec2& x) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  const Vec2 r = x - a;
  const double s = r.dot(d) / len2;
  const double h = (d.x() * r.y() - d.y() * r.x()) / len2;
  const std::complex<double> z(2.0 * s - 1.0, 2.0 * h);
  std::complex<double> w = z + std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
  double rho = std::abs(w);
  if (rho < 1.0) rho = 1.0 / rho;
  return rho;
}

}  // namespace trijunc
