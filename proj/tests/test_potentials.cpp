#include "doctest.h"
#include "oracles.hpp"

#include "trijunc/errors.hpp"
#include "trijunc/potentials.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace trijunc;

namespace {
constexpr double kPi = std::numbers::pi;

double dlp(double beta, double theta0, double t, double tol = 1e-16) {
  return segment_dlp_power(SegmentPowerQuery{beta, theta0, t, tol});
}
double slp_grad(double beta, double theta0, double t, double tol = 1e-16) {
  return segment_slp_grad_power(SegmentPowerQuery{beta, theta0, t, tol});
}

std::vector<double> sample(const PanelizedCurve& c, double (*f)(const Vec2&)) {
  std::vector<double> out;
  for (const auto& p : c.panels)
    for (const auto& x : p.nodes) out.push_back(f(x));
  return out;
}
}  // namespace

TEST_CASE("kernel values") {
  KernelPoint p;
  p.source = Vec2(0, 0);
  p.source_normal = Vec2(0, 1);
  p.target = Vec2(0, 1);
  CHECK(kernel_K(p) == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-15));
  p.target = Vec2(3, 0);
  CHECK(kernel_K(p) == 0.0);
  p.target = p.source;
  CHECK_THROWS_AS(kernel_K(p), DomainError);
  CHECK_THROWS_AS(green_S(Vec2(1, 1), Vec2(1, 1)), DomainError);
  CHECK(green_S(Vec2(0, 0), Vec2(std::exp(1.0), 0)) == doctest::Approx(-1.0 / (2 * kPi)));
}

TEST_CASE("kernel against an independent evaluation") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2, 2), ang(0, 2 * kPi);
  for (int n = 0; n < 200; ++n) {
    KernelPoint p;
    p.source = Vec2(u(gen), u(gen));
    p.target = Vec2(u(gen), u(gen));
    const double a = ang(gen), b = ang(gen);
    p.source_normal = Vec2(std::cos(a), std::sin(a));
    p.target_normal = Vec2(std::cos(b), std::sin(b));
    const double ref = oracle::dlp_kernel(p.source, p.source_normal, p.target);
    CHECK(std::abs(kernel_K(p) - ref) <= 1e-15 * std::max(1.0, std::abs(ref)));
    // Adjoint kernel is the double-layer kernel with the roles of the points swapped.
    const double adj = oracle::dlp_kernel(p.target, p.target_normal, p.source);
    CHECK(std::abs(kernel_Kadj(p) - adj) <= 1e-14 * std::max(1.0, std::abs(adj)));
    KernelPoint q{p.target, p.source, p.target_normal, p.source_normal};
    CHECK(std::abs(kernel_Kadj(p) - kernel_K(q)) <= 1e-14 * std::max(1.0, std::abs(adj)));
  }
}

TEST_CASE("Gauss identity on the unit square") {
  const std::vector<Vec2> sq{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  const auto curve = panelize_polygon(sq, 4, 16);
  const std::vector<double> one(curve.size(), 1.0);
  // Normals point out of the counterclockwise square.
  CHECK(curve.panels[0].normal.y() == doctest::Approx(-1.0));
  const double inside = eval_layer(curve, one, Vec2(0.5, 0.5), Layer::D);
  CHECK(inside == doctest::Approx(-1.0).epsilon(1e-12));
  const double outside = eval_layer(curve, one, Vec2(4.0, 3.0), Layer::D);
  CHECK(std::abs(outside) < 1e-12);
  // Oracle: adaptive quadrature over the four sides.
  double ref = 0.0;
  for (int k = 0; k < 4; ++k)
    ref += oracle::segment_dlp_general(sq[k], sq[(k + 1) % 4], [](double) { return 1.0; }, Vec2(0.5, 0.5));
  CHECK(ref == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("single layer far from a segment") {
  const auto curve = panelize_segment(Vec2(0, 0), Vec2(1, 0), 2, 16);
  const std::vector<double> one(curve.size(), 1.0);
  const double v = eval_layer(curve, one, Vec2(10, 10), Layer::S);
  const double ref = oracle::segment_slp(Vec2(0, 0), Vec2(1, 0), [](double) { return 1.0; }, Vec2(10, 10));
  CHECK(std::abs(v - ref) <= 1e-12);

  auto f = [](const Vec2& x) { return std::cos(3 * x.x()) + x.x() * x.x(); };
  const auto dens = sample(curve, f);
  const double d = eval_layer(curve, dens, Vec2(0.3, 2.0), Layer::D);
  const double dref = oracle::segment_dlp_general(Vec2(0, 0), Vec2(1, 0),
                                                  [&](double s) { return f(Vec2(s, 0)); }, Vec2(0.3, 2.0));
  CHECK(std::abs(d - dref) <= 1e-12);
}

TEST_CASE("near targets are rejected") {
  const auto curve = panelize_segment(Vec2(0, 0), Vec2(1, 0), 2, 16);
  const std::vector<double> one(curve.size(), 1.0);
  CHECK_THROWS_AS(eval_layer(curve, one, Vec2(0.5, 0.01), Layer::D), DomainError);
}

TEST_CASE("segment double layer: special values") {
  for (double beta : {0.0, 0.5, 1.0, 2.7, 13.0})
    for (double t : {0.1, 0.5, 0.9}) CHECK(dlp(beta, kPi, t) == 0.0);
  for (double theta0 : {0.3, 1.7, 4.0})
    CHECK(dlp(0.0, theta0, 1e-12) == doctest::Approx((kPi - theta0) / (2 * kPi)).epsilon(1e-10));
  CHECK_THROWS_AS(dlp(0.5, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(slp_grad(0.5, 1.0, 1.2), DomainError);
}

TEST_CASE("segment double layer against quadrature") {
  CHECK(std::abs(dlp(0.75, 1.1, 0.3) - oracle::segment_dlp(0.75, 1.1, 0.3)) <= 1e-12);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ub(0.0, 50.0), uth(0.1, 2 * kPi - 0.1), ut(0.02, 0.9);
  for (int n = 0; n < 25; ++n) {
    const double beta = n < 3 ? double(n) : ub(gen), th = uth(gen), t = ut(gen);
    const double ref = oracle::segment_dlp(beta, th, t);
    INFO("beta=" << beta << " theta0=" << th << " t=" << t);
    CHECK(std::abs(dlp(beta, th, t) - ref) <= 1e-12);
  }
}

TEST_CASE("segment single-layer gradient") {
  CHECK(slp_grad(0.8, kPi, 0.4) == 0.0);
  CHECK(std::abs(slp_grad(0.8, 0.9, 0.25) - oracle::segment_slp_grad(0.8, 0.9, 0.25)) <= 1e-11);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> ub(0.5, 20.0), uth(0.1, 2 * kPi - 0.1), ut(0.02, 0.9);
  for (int n = 0; n < 10; ++n) {
    double beta = ub(gen);
    if (std::abs(beta - std::round(beta)) < 1e-3) beta += 0.01;
    const double th = uth(gen), t = ut(gen);
    // Term by term, the gradient series is the double-layer series divided by -t.
    CHECK(slp_grad(beta, th, t) == doctest::Approx(-dlp(beta, th, t) / t).epsilon(1e-12));
    CHECK(std::abs(slp_grad(beta, th, t) - oracle::segment_slp_grad(beta, th, t)) <= 1e-10 / t);
  }
}

TEST_CASE("integer branch continuity") {
  for (int m : {1, 2, 5})
    for (double th : {0.7, 2.9}) {
      const double t = 0.4;
      const double at = dlp(m, th, t);
      CHECK(std::abs(dlp(m + 1e-7, th, t) - at) <= 1e-5);
      CHECK(std::abs(dlp(m - 1e-7, th, t) - at) <= 1e-5);
      CHECK(std::abs(at - oracle::segment_dlp(m, th, t)) <= 1e-12);
    }
}

TEST_CASE("series truncation stays within the tail bound") {
  for (double t : {0.2, 0.6, 0.9})
    for (double beta : {0.0, 1.3, 7.0}) {
      const auto loose = segment_dlp_power_series(SegmentPowerQuery{beta, 2.0, t, 1e-8});
      const auto tight = segment_dlp_power_series(SegmentPowerQuery{beta, 2.0, t, 1e-16});
      CHECK(tight.terms >= loose.terms);
      CHECK(std::abs(tight.value - loose.value) <= loose.tail_bound + 1e-16);
    }
}

TEST_CASE("jump relations") {
  const Vec2 a(0, 0), b(1, 0);
  const auto one = jump_relation_check(a, b, [](double) { return 1.0; }, 0.5, Layer::D);
  // Crossing from the side opposite the normal to the normal side changes D by +rho.
  CHECK(one.jump == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(one.defect <= 1e-8);
  const auto smooth = jump_relation_check(a, b, [](double s) { return s * (1 - s); }, 0.5, Layer::D);
  CHECK(smooth.defect <= 1e-8);
  CHECK(smooth.jump == doctest::Approx(0.25).epsilon(1e-8));
  const auto adj = jump_relation_check(a, b, [](double s) { return s * (1 - s); }, 0.5, Layer::Dadj);
  CHECK(adj.defect <= 1e-8);
  CHECK(adj.jump * smooth.jump < 0.0);
}
