#include "trijunc/discretize.hpp"

#include "trijunc/errors.hpp"
#include "trijunc/potentials.hpp"
#include "trijunc/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

namespace trijunc {

namespace {

constexpr double kDirectRho = 3.0;       // smooth panels: order 16 is exact to ~rho^-32
constexpr double kGridDirectRho = 2.0;   // reference grid panels: order 30
constexpr double kCornerDirectRho = 4.0;  // corner rule applied directly; ~1e-14 for the kernels here

std::string pair_name(const Panel& src, int target) {
  std::ostringstream os;
  os << "source panel on edge " << src.edge << " [" << src.s0 << ", " << src.s1 << "], target node " << target;
  return os.str();
}

bool on_source_line(const CompositeMesh& mesh, int edge, const Vec2& x) {
  const auto& e = mesh.edges()[edge];
  const Vec2& a = mesh.vertices()[e.v_start];
  return std::abs(e.normal.dot(x - a)) <= 1e-13 * std::max(1.0, e.length);
}

// Integrals of K(y(t), x) against the Lagrange basis of a panel parameterised by t in [ta, tb].
void near_moments(const Panel& p, double ta, double tb, const Vec2& normal, const Vec2& x, int order,
                  double* out, const std::string& what) {
  const GaussRule& g = gauss_legendre(order);
  std::vector<double> l(order);
  auto f = [&](double t, double* o) {
    const double k = kernel_K_raw(p.point(t), normal, x) * p.length;
    lagrange_basis(g, 2.0 * (t - ta) / (tb - ta) - 1.0, l.data());
    for (int q = 0; q < order; ++q) o[q] = k * l[q];
  };
  AdaptiveOptions opt;
  opt.abs_tol = 1e-16;
  if (!integrate_adaptive(f, ta, tb, order, out, opt))
    throw ConvergenceError("discretize", "assemble_Kdir", "adaptive quadrature did not converge for " + what);
}

}  // namespace

std::vector<Panel> build_panels(const CompositeMesh& mesh, const CornerRule& rule, const DiscretizationOptions& opt) {
  const std::string op = "build_panels";
  if (opt.smooth_order < 2) throw DomainError("discretize", op, "smooth order must be at least 2");
  for (const auto& c : mesh.corners())
    for (double ang : c.angles)
      if (ang < opt.min_angle || ang > 2.0 * std::numbers::pi - opt.min_angle)
        throw DomainError("discretize", op,
                          "angle " + std::to_string(ang) + " at vertex " + std::to_string(c.vertex) +
                              " lies outside the supported range [pi/12, 2 pi - pi/12]");

  const GaussRule& gl = gauss_legendre(opt.smooth_order);
  std::vector<Panel> panels;
  int offset = 0;
  for (const auto& e : mesh.edges()) {
    const int np = opt.panels_per_edge > 0 ? opt.panels_per_edge : e.panels_per_edge;
    if (np < 2) throw DomainError("discretize", op, "each edge needs at least two panels");
    const Vec2& a = mesh.vertices()[e.v_start];
    const Vec2& b = mesh.vertices()[e.v_end];
    const double h = e.length / np;
    for (int k = 0; k < np; ++k) {
      Panel p;
      p.edge = e.id;
      p.s0 = k * h;
      p.s1 = (k + 1 == np) ? e.length : (k + 1) * h;
      p.length = p.s1 - p.s0;
      p.offset = offset;
      if (k == 0 || k + 1 == np) {
        p.kind = PanelKind::Corner;
        const bool at_start = k == 0;
        p.vertex = at_start ? e.v_start : e.v_end;
        p.origin = at_start ? a : b;
        p.direction = at_start ? e.tangent : Vec2(-e.tangent);
        for (int j = 0; j < rule.k; ++j) {
          p.nodes.push_back(p.point(rule.nodes[j]));
          p.weights.push_back(rule.weights[j] * p.length);
        }
      } else {
        p.kind = PanelKind::Smooth;
        p.origin = a + p.s0 * e.tangent;
        p.direction = e.tangent;
        for (int j = 0; j < opt.smooth_order; ++j) {
          p.nodes.push_back(p.point(0.5 * (gl.nodes[j] + 1.0)));
          p.weights.push_back(0.5 * gl.weights[j] * p.length);
        }
      }
      offset += p.size();
      panels.push_back(std::move(p));
    }
  }
  return panels;
}

Eigen::MatrixXd NystromSystem::dirichlet_matrix() const {
  Eigen::MatrixXd M = d.asDiagonal() * D;
  M.diagonal().array() -= 0.5;
  return M;
}

Eigen::MatrixXd NystromSystem::neumann_matrix() const {
  Eigen::MatrixXd M = d.asDiagonal() * D.transpose();
  M.diagonal().array() -= 0.5;
  return M;
}

NystromSystem assemble_Kdir(const CompositeMesh& mesh, const CornerRule& rule, const DiscretizationOptions& opt) {
  NystromSystem sys;
  sys.panels = build_panels(mesh, rule, opt);
  sys.rule_hash = hash_hex(rule.hash());
  const int n = sys.panels.back().offset + sys.panels.back().size();
  sys.D = Eigen::MatrixXd::Zero(n, n);
  sys.d.resize(n);
  sys.sqrt_w.resize(n);
  sys.nodes.resize(2, n);
  sys.normals.resize(2, n);
  sys.node_edge.resize(n);
  for (const auto& p : sys.panels)
    for (int j = 0; j < p.size(); ++j) {
      const int i = p.offset + j;
      sys.nodes.col(i) = p.nodes[j];
      sys.normals.col(i) = mesh.edges()[p.edge].normal;
      sys.sqrt_w[i] = std::sqrt(p.weights[j]);
      sys.d[i] = mesh.edge_coefficient(p.edge);
      sys.node_edge[i] = p.edge;
    }

  const ReferenceGrid& grid = reference_grid();
  const Eigen::MatrixXd G = rule.grid_interp();
  const int ng = static_cast<int>(grid.t.size());
  const int smooth_order = opt.smooth_order;
  Eigen::RowVectorXd qv(ng);
  std::vector<double> mom(std::max(grid.order, smooth_order));

  for (const auto& src : sys.panels) {
    const Vec2& nrm = mesh.edges()[src.edge].normal;
    const Vec2 pa = src.point(0.0), pb = src.point(1.0);
    for (int i = 0; i < n; ++i) {
      if (sys.node_edge[i] == src.edge) continue;
      const Vec2 x = sys.nodes.col(i);
      if (on_source_line(mesh, src.edge, x)) continue;
      auto row = sys.D.row(i).segment(src.offset, src.size());

      const double rho = bernstein_rho(pa, pb, x);
      const bool direct = rho >= (src.kind == PanelKind::Smooth ? kDirectRho : kCornerDirectRho);
      if (direct) {
        for (int j = 0; j < src.size(); ++j)
          row[j] = sys.sqrt_w[i] * kernel_K_raw(src.nodes[j], nrm, x) * src.weights[j] / sys.sqrt_w[src.offset + j];
        continue;
      }
      if (src.kind == PanelKind::Smooth) {
        near_moments(src, 0.0, 1.0, nrm, x, smooth_order, mom.data(), pair_name(src, i));
        for (int j = 0; j < src.size(); ++j) row[j] = sys.sqrt_w[i] * mom[j] / sys.sqrt_w[src.offset + j];
        continue;
      }
      // Corner source near the target: integrate on the graded grid, then map to the rule nodes.
      for (std::size_t gp = 0; gp < grid.panels.size(); ++gp) {
        const auto [ta, tb] = grid.panels[gp];
        const int base = static_cast<int>(gp) * grid.order;
        if (bernstein_rho(src.point(ta), src.point(tb), x) >= kGridDirectRho) {
          for (int q = 0; q < grid.order; ++q)
            qv[base + q] = kernel_K_raw(src.point(grid.t[base + q]), nrm, x) * grid.w[base + q] * src.length;
        } else {
          near_moments(src, ta, tb, nrm, x, grid.order, mom.data(), pair_name(src, i));
          for (int q = 0; q < grid.order; ++q) qv[base + q] = mom[q];
        }
      }
      const Eigen::RowVectorXd r = qv * G;
      for (int j = 0; j < src.size(); ++j) row[j] = sys.sqrt_w[i] * r[j] / sys.sqrt_w[src.offset + j];
    }
  }
  return sys;
}

NystromSystem with_materials(const NystromSystem& sys, const CompositeMesh& mesh) {
  NystromSystem out = sys;
  for (int i = 0; i < out.size(); ++i) out.d[i] = mesh.edge_coefficient(out.node_edge[i]);
  return out;
}

namespace {

Eigen::VectorXd build_rhs(const CompositeMesh& mesh, const NystromSystem& sys, const EdgeFunction& fn, bool neumann) {
  Eigen::VectorXd r(sys.size());
  for (int i = 0; i < sys.size(); ++i) {
    const auto& e = mesh.edges()[sys.node_edge[i]];
    const Region& L = mesh.region(e.left_region);
    const Region& R = mesh.region(e.right_region);
    const double den = R.mu * L.nu + L.mu * R.nu;
    const double scale = neumann ? -L.mu * R.mu / den : L.nu * R.nu / den;
    const double v = fn(e.id, sys.nodes.col(i));
    r[i] = v == 0.0 ? 0.0 : sys.sqrt_w[i] * scale * v;
  }
  return r;
}

}  // namespace

Eigen::VectorXd build_rhs_dirichlet(const CompositeMesh& mesh, const NystromSystem& sys, const EdgeFunction& f) {
  return build_rhs(mesh, sys, f, false);
}

Eigen::VectorXd build_rhs_neumann(const CompositeMesh& mesh, const NystromSystem& sys, const EdgeFunction& g) {
  return build_rhs(mesh, sys, g, true);
}

void dump_matrix(const NystromSystem& sys, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("discretize", "dump_matrix", "cannot open " + path);
  const std::int64_t n = sys.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (int i = 0; i < n; ++i) out.write(reinterpret_cast<const char*>(sys.nodes.col(i).data()), 2 * sizeof(double));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> M = sys.dirichlet_matrix();
  out.write(reinterpret_cast<const char*>(M.data()), sizeof(double) * M.size());
}

}  // namespace trijunc
