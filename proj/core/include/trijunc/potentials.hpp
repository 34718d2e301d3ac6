#pragma once

#include "trijunc/quadrature.hpp"

#include <functional>
#include <vector>

namespace trijunc {

struct KernelPoint {
  Vec2 source = Vec2::Zero();
  Vec2 target = Vec2::Zero();
  Vec2 source_normal = Vec2::Zero();
  Vec2 target_normal = Vec2::Zero();
};

// Double-layer kernel (1/2pi) n(x).(y - x) / |x - y|^2 with x = source, y = target.
double kernel_K(const KernelPoint& p);
// Adjoint kernel (1/2pi) n(y).(x - y) / |x - y|^2 (normal at the target).
double kernel_Kadj(const KernelPoint& p);
// Fundamental solution -(1/2pi) log |x - y|.
double green_S(const Vec2& x, const Vec2& y);

inline double kernel_K_raw(const Vec2& x, const Vec2& nx, const Vec2& y) {
  const double dx = y.x() - x.x(), dy = y.y() - x.y();
  return (nx.x() * dx + nx.y() * dy) / ((dx * dx + dy * dy) * 6.283185307179586476925286766559);
}

enum class Layer { S, D, Dadj };

struct SourcePanel {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  Vec2 normal = Vec2::Zero();
  std::vector<Vec2> nodes;
  std::vector<double> weights;  // arclength weights
};

// Straight panels; densities are stored panel by panel in node order.
struct PanelizedCurve {
  std::vector<SourcePanel> panels;
  int size() const;
};

// Splits segment [a, b] into npanels Gauss-Legendre panels of order q.
PanelizedCurve panelize_segment(const Vec2& a, const Vec2& b, int npanels, int q);
// Closed polygon traversed in the given order (normal = perp of each side).
PanelizedCurve panelize_polygon(const std::vector<Vec2>& corners, int npanels, int q);

// Smooth-quadrature evaluation of S, D or D* at a well-separated target.
// Throws DomainError if any panel has Bernstein parameter below min_rho.
double eval_layer(const PanelizedCurve& curve, const std::vector<double>& density, const Vec2& target,
                  Layer which, const Vec2& target_normal = Vec2::Zero(), double min_rho = 3.0);

// Unit segment from the origin along angle theta, target at t e(theta + theta0).
struct SegmentPowerQuery {
  double beta = 0.0;
  double theta0 = 1.0;
  double t = 0.5;
  double tol = 1e-16;
};

struct SeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;
  int terms = 0;
};

// D[s^beta] on the segment (normal rotated +90 degrees from the segment direction).
SeriesValue segment_dlp_power_series(const SegmentPowerQuery& q);
double segment_dlp_power(const SegmentPowerQuery& q);

// n . grad S[s^(beta - 1)] with n the +90 degree rotation of the target direction.
SeriesValue segment_slp_grad_power_series(const SegmentPowerQuery& q);
double segment_slp_grad_power(const SegmentPowerQuery& q);

struct JumpReport {
  double limit_plus = 0.0;       // approaching from the side the normal points into
  double limit_minus = 0.0;
  double principal_value = 0.0;
  double jump = 0.0;             // limit_plus - limit_minus
  double expected_jump = 0.0;    // +rho(x0) for D, -rho(x0) for D*
  double defect = 0.0;
};

// Limits of D (or n.grad S for Layer::Dadj) at x0 = a + s0 (b - a), extrapolated
// from off-surface evaluations along the normal. density is a function of s in [0, 1].
JumpReport jump_relation_check(const Vec2& a, const Vec2& b, const std::function<double(double)>& density,
                               double s0, Layer which = Layer::D);

}  // namespace trijunc
