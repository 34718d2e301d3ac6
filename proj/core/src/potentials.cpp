#include "trijunc/potentials.hpp"

#include "trijunc/errors.hpp"

#include <cmath>
#include <numbers>

namespace trijunc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kIntegerProximity = 1e-9;
constexpr double kCombinedWindow = 0.1;
constexpr long kMaxTerms = 1000000;

// sin(x) - x without cancellation for small x.
double sin_minus_x(double x) {
  if (std::abs(x) > 0.5) return std::sin(x) - x;
  const double x2 = x * x;
  double term = -x * x2 / 6.0;
  double sum = term;
  for (int k = 2; k < 12; ++k) {
    term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
    sum += term;
  }
  return sum;
}

// (1/2pi eps) - cos(eps A) t^eps / (2 sin(pi eps)), evaluated stably for small eps.
double pole_pair(double eps, double A, double L) {
  const double pe = kPi * eps;
  const double growth = std::exp(eps * L);
  const double s = std::sin(0.5 * eps * A);
  const double cos_exp_m1 = -2.0 * s * s * growth + std::expm1(eps * L);
  const double numer = sin_minus_x(pe) - pe * cos_exp_m1;
  return numer / (2.0 * pe * std::sin(pe));
}

// sin(eps A) / sin(pi eps) with the removable singularity at eps = 0.
double sine_ratio(double eps, double A) {
  if (eps == 0.0) return A / kPi;
  return std::sin(eps * A) / std::sin(kPi * eps);
}

}  // namespace

double kernel_K(const KernelPoint& p) {
  const Vec2 r = p.target - p.source;
  const double r2 = r.squaredNorm();
  if (r2 == 0.0) throw DomainError("potentials", "kernel_K", "coincident source and target");
  return p.source_normal.dot(r) / (kTwoPi * r2);
}

double kernel_Kadj(const KernelPoint& p) {
  const Vec2 r = p.source - p.target;
  const double r2 = r.squaredNorm();
  if (r2 == 0.0) throw DomainError("potentials", "kernel_Kadj", "coincident source and target");
  return p.target_normal.dot(r) / (kTwoPi * r2);
}

double green_S(const Vec2& x, const Vec2& y) {
  const double r = (x - y).norm();
  if (r == 0.0) throw DomainError("potentials", "green_S", "coincident points");
  return -std::log(r) / kTwoPi;
}

int PanelizedCurve::size() const {
  int n = 0;
  for (const auto& p : panels) n += static_cast<int>(p.nodes.size());
  return n;
}

PanelizedCurve panelize_segment(const Vec2& a, const Vec2& b, int npanels, int q) {
  const GaussRule& g = gauss_legendre(q);
  PanelizedCurve c;
  const Vec2 d = b - a;
  const double len = d.norm();
  const Vec2 normal(d.y() / len, -d.x() / len);
  for (int p = 0; p < npanels; ++p) {
    SourcePanel sp;
    sp.a = a + d * (static_cast<double>(p) / npanels);
    sp.b = a + d * (static_cast<double>(p + 1) / npanels);
    sp.normal = normal;
    const double half = 0.5 * len / npanels;
    for (int k = 0; k < q; ++k) {
      sp.nodes.push_back(0.5 * (sp.a + sp.b) + 0.5 * (sp.b - sp.a) * g.nodes[k]);
      sp.weights.push_back(half * g.weights[k]);
    }
    c.panels.push_back(std::move(sp));
  }
  return c;
}

PanelizedCurve panelize_polygon(const std::vector<Vec2>& corners, int npanels, int q) {
  PanelizedCurve c;
  for (std::size_t k = 0; k < corners.size(); ++k) {
    auto side = panelize_segment(corners[k], corners[(k + 1) % corners.size()], npanels, q);
    for (auto& p : side.panels) c.panels.push_back(std::move(p));
  }
  return c;
}

double eval_layer(const PanelizedCurve& curve, const std::vector<double>& density, const Vec2& target,
                  Layer which, const Vec2& target_normal, double min_rho) {
  if (static_cast<int>(density.size()) != curve.size())
    throw DomainError("potentials", "eval_layer", "density length does not match the node count");
  double sum = 0.0;
  std::size_t idx = 0;
  for (const auto& p : curve.panels) {
    if (bernstein_rho(p.a, p.b, target) < min_rho)
      throw DomainError("potentials", "eval_layer",
                        "target too close to a source panel for smooth quadrature; use an adaptive "
                        "quadrature fallback");
    for (std::size_t k = 0; k < p.nodes.size(); ++k, ++idx) {
      const Vec2& x = p.nodes[k];
      double kern = 0.0;
      switch (which) {
        case Layer::S: kern = green_S(x, target); break;
        case Layer::D: kern = kernel_K_raw(x, p.normal, target); break;
        case Layer::Dadj: kern = kernel_K_raw(target, target_normal, x); break;
      }
      sum += kern * p.weights[k] * density[idx];
    }
  }
  return sum;
}

SeriesValue segment_dlp_power_series(const SegmentPowerQuery& q) {
  const std::string op = "segment_dlp_power";
  const double beta = q.beta, th = q.theta0, t = q.t;
  if (!(t > 0.0) || !(t < 1.0)) throw DomainError("potentials", op, "target radius must lie in (0, 1)");
  if (!(beta >= 0.0)) throw DomainError("potentials", op, "beta must be nonnegative");
  if (!(q.tol > 0.0)) throw DomainError("potentials", op, "tolerance must be positive");
  // Collinear target: the kernel vanishes identically.
  if (th == std::numbers::pi) return SeriesValue{};

  const double L = std::log(t);
  long kgeo = static_cast<long>(std::ceil(std::log(q.tol * (1.0 - t)) / L));
  long K = std::max<long>(static_cast<long>(std::ceil(beta)) + 1, kgeo);
  if (K > kMaxTerms) {
    throw DomainError("potentials", op,
                      t > 0.95 ? "series tolerance unreachable for t > 0.95" : "series term cap exceeded");
  }

  const long m = std::lround(beta);
  const double eps = beta - static_cast<double>(m);
  const bool integer = std::abs(eps) <= kIntegerProximity;
  const bool combined = !integer && std::abs(eps) < kCombinedWindow;
  const double A = kPi - th;
  const double b = integer ? static_cast<double>(m) : beta;

  double lead = 0.0;
  const double tm = std::pow(t, static_cast<double>(m));
  if (integer) {
    lead = A * std::cos(m * th) / kTwoPi * tm - std::sin(m * th) / kTwoPi * tm * L;
  } else if (combined) {
    lead = std::cos(m * th) * 0.5 * sine_ratio(eps, A) * std::pow(t, beta);
    if (m >= 1) lead += std::sin(m * th) * tm * pole_pair(eps, A, L);
  } else {
    lead = std::sin(beta * A) / (2.0 * std::sin(kPi * beta)) * std::pow(t, beta);
  }

  const bool skip_m = (integer || combined) && m >= 1;
  double sum = 0.0;
  double tk = 1.0;
  for (long k = 1; k <= K; ++k) {
    tk *= t;
    if (skip_m && k == m) continue;
    sum += std::sin(k * th) / (b - k) * tk;
  }
  SeriesValue out;
  out.value = lead + sum / kTwoPi;
  out.tail_bound = tk * t / ((1.0 - t) * std::max(1.0, K + 1.0 - beta)) / kTwoPi;
  out.terms = static_cast<int>(K);
  return out;
}

double segment_dlp_power(const SegmentPowerQuery& q) { return segment_dlp_power_series(q).value; }

SeriesValue segment_slp_grad_power_series(const SegmentPowerQuery& q) {
  if (!(q.beta >= 0.5 - 1e-12))
    throw DomainError("potentials", "segment_slp_grad_power", "beta must be at least 1/2");
  // Term by term the gradient series is the double-layer series times -1/t.
  SeriesValue s = segment_dlp_power_series(q);
  s.value = -s.value / q.t;
  s.tail_bound /= q.t;
  return s;
}

double segment_slp_grad_power(const SegmentPowerQuery& q) { return segment_slp_grad_power_series(q).value; }

JumpReport jump_relation_check(const Vec2& a, const Vec2& b, const std::function<double(double)>& density,
                               double s0, Layer which) {
  if (!(s0 > 0.0 && s0 < 1.0))
    throw DomainError("potentials", "jump_relation_check", "x0 must lie strictly inside the segment");
  if (which == Layer::S) throw DomainError("potentials", "jump_relation_check", "single layer has no jump");
  const Vec2 d = b - a;
  const double len = d.norm();
  const Vec2 n(d.y() / len, -d.x() / len);
  const Vec2 x0 = a + s0 * d;

  auto potential = [&](const Vec2& x) {
    auto f = [&](double s, double* out) {
      const Vec2 y = a + s * d;
      out[0] = (which == Layer::D ? kernel_K_raw(y, n, x) : kernel_K_raw(x, n, y)) * density(s) * len;
    };
    AdaptiveOptions opt;
    opt.abs_tol = 1e-15;
    double lo = 0.0, hi = 0.0;
    integrate_adaptive(f, 0.0, s0, 1, &lo, opt);
    integrate_adaptive(f, s0, 1.0, 1, &hi, opt);
    return lo + hi;
  };

  // Neville extrapolation to h = 0 from a geometric sequence of approach distances.
  auto limit = [&](double side) {
    const int levels = 7;
    std::vector<double> h(levels), v(levels);
    for (int k = 0; k < levels; ++k) {
      h[k] = 0.02 * std::pow(0.5, k) * len;
      v[k] = potential(x0 + side * h[k] * n);
    }
    for (int m = 1; m < levels; ++m)
      for (int k = levels - 1; k >= m; --k)
        v[k] = (h[k - m] * v[k] - h[k] * v[k - 1]) / (h[k - m] - h[k]);
    return v[levels - 1];
  };

  JumpReport r;
  r.limit_plus = limit(1.0);
  r.limit_minus = limit(-1.0);
  // On a straight segment the kernel vanishes identically, so the principal value is 0.
  {
    auto f = [&](double s, double* out) {
      const Vec2 y = a + s * d;
      out[0] = (which == Layer::D ? kernel_K_raw(y, n, x0) : kernel_K_raw(x0, n, y)) * density(s) * len;
    };
    double lo = 0.0, hi = 0.0;
    const double gap = 1e-8;
    integrate_adaptive(f, 0.0, s0 - gap, 1, &lo);
    integrate_adaptive(f, s0 + gap, 1.0, 1, &hi);
    r.principal_value = lo + hi;
  }
  r.jump = r.limit_plus - r.limit_minus;
  r.expected_jump = (which == Layer::D ? 1.0 : -1.0) * density(s0);
  r.defect = std::max({std::abs(r.jump - r.expected_jump),
                       std::abs(r.limit_plus - (r.principal_value + 0.5 * r.expected_jump)),
                       std::abs(r.limit_minus - (r.principal_value - 0.5 * r.expected_jump))});
  return r;
}

}  // namespace trijunc
