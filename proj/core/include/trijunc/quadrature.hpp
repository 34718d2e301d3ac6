#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace trijunc {

using Vec2 = Eigen::Vector2d;

struct GaussRule {
  Eigen::VectorXd nodes;    // on [-1, 1], ascending
  Eigen::VectorXd weights;
  Eigen::VectorXd bary;     // barycentric weights for interpolation at the nodes
};

// Gauss-Legendre rule with n points; results are cached per n.
const GaussRule& gauss_legendre(int n);

// Values of all Lagrange cardinal functions of `rule` at u in [-1, 1] (or beyond).
void lagrange_basis(const GaussRule& rule, double u, double* out);

// Bernstein ellipse parameter of point x relative to segment [a, b].
// Values near 1 mean x is close to the segment; large means well separated.
double bernstein_rho(const Vec2& a, const Vec2& b, const Vec2& x);

struct AdaptiveOptions {
  double abs_tol = 1e-15;
  double rel_tol = 1e-14;
  int order = 20;
  int max_depth = 60;
};

// Adaptive Gauss-Legendre quadrature of a vector-valued integrand on [a, b].
// f(s, out) fills out[0..dim). Returns false if some subinterval hit max_depth.
template <class F>
bool integrate_adaptive(F&& f, double a, double b, int dim, double* result,
                        const AdaptiveOptions& opt = {}) {
  const GaussRule& g = gauss_legendre(opt.order);
  std::vector<double> buf(dim);
  auto rule = [&](double lo, double hi, Eigen::VectorXd& acc) {
    acc.setZero(dim);
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int k = 0; k < g.nodes.size(); ++k) {
      f(mid + half * g.nodes[k], buf.data());
      const double wk = half * g.weights[k];
      for (int d = 0; d < dim; ++d) acc[d] += wk * buf[d];
    }
  };
  struct Piece {
    double lo, hi;
    Eigen::VectorXd val;
    int depth;
  };
  Eigen::VectorXd total = Eigen::VectorXd::Zero(dim);
  std::vector<Piece> stack;
  Piece root{a, b, Eigen::VectorXd(), 0};
  rule(a, b, root.val);
  stack.push_back(std::move(root));
  const double length = std::abs(b - a);
  bool ok = true;
  Eigen::VectorXd left, right;
  while (!stack.empty()) {
    Piece p = std::move(stack.back());
    stack.pop_back();
    const double m = 0.5 * (p.lo + p.hi);
    rule(p.lo, m, left);
    rule(m, p.hi, right);
    Eigen::VectorXd both = left + right;
    const double err = (both - p.val).cwiseAbs().maxCoeff();
    const double frac = length > 0 ? std::abs(p.hi - p.lo) / length : 1.0;
    const double tol = std::max(opt.abs_tol * frac, opt.rel_tol * both.cwiseAbs().maxCoeff());
    if (err <= tol || p.depth >= opt.max_depth) {
      if (err > tol) ok = false;
      total += both;
      continue;
    }
    stack.push_back(Piece{p.lo, m, left, p.depth + 1});
    stack.push_back(Piece{m, p.hi, right, p.depth + 1});
  }
  for (int d = 0; d < dim; ++d) result[d] = total[d];
  return ok;
}

}  // namespace trijunc
