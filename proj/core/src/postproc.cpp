#include "trijunc/postproc.hpp"

#include "trijunc/errors.hpp"
#include "trijunc/potentials.hpp"
#include "trijunc/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace trijunc {

namespace {

constexpr double kMinRho = 3.0;
constexpr double kCornerMinRho = 3.5;

}  // namespace

FieldSolution::FieldSolution(const CompositeMesh& m, const NystromSystem& sys, Eigen::VectorXd s, Eigen::VectorXd r)
    : mesh(m), panels(sys.panels), nodes(sys.nodes), normals(sys.normals), sqrt_w(sys.sqrt_w), sigma(std::move(s)),
      rho(std::move(r)) {
  if (sigma.size() == 0) sigma = Eigen::VectorXd::Zero(sys.size());
  if (rho.size() == 0) rho = Eigen::VectorXd::Zero(sys.size());
  if (sigma.size() != sys.size() || rho.size() != sys.size())
    throw SizeError("postproc", "FieldSolution", "density length does not match the system size");
}

bool is_far_from_boundary(const FieldSolution& sol, const Vec2& x) {
  for (const auto& p : sol.panels) {
    const double limit = p.kind == PanelKind::Corner ? kCornerMinRho : kMinRho;
    if (bernstein_rho(p.point(0.0), p.point(1.0), x) < limit) return false;
  }
  return true;
}

double eval_field(const FieldSolution& sol, const Vec2& x, int region) {
  const std::string op = "eval_field";
  if (!sol.mesh.has_region(region)) throw DomainError("postproc", op, "unknown region " + std::to_string(region));
  if (sol.mesh.locate(x) != region)
    throw DomainError("postproc", op, "target is not inside region " + std::to_string(region));
  if (!is_far_from_boundary(sol, x))
    throw DomainError("postproc", op, "target lies in the near-boundary band; near-field evaluation is not supported");
  const Region& R = sol.mesh.region(region);
  double s = 0.0, d = 0.0;
  for (int j = 0; j < sol.nodes.cols(); ++j) {
    const Vec2 y = sol.nodes.col(j);
    if (sol.rho[j] != 0.0) s += green_S(x, y) * sol.sqrt_w[j] * sol.rho[j];
    if (sol.sigma[j] != 0.0) d += kernel_K_raw(y, sol.normals.col(j), x) * sol.sqrt_w[j] * sol.sigma[j];
  }
  return -s / R.mu - d / R.nu;
}

std::vector<Vec2> manufactured_sources(const CompositeMesh& mesh, int region, int count) {
  Vec2 lo(INFINITY, INFINITY), hi(-INFINITY, -INFINITY);
  Vec2 centroid = Vec2::Zero();
  int nv = 0;
  for (const auto& e : mesh.edges()) {
    if (e.left_region != region && e.right_region != region) continue;
    for (int v : {e.v_start, e.v_end}) {
      const Vec2& p = mesh.vertices()[v];
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
      centroid += p;
      ++nv;
    }
  }
  if (nv == 0) throw DomainError("postproc", "manufactured_sources", "region has no edges");
  centroid /= nv;
  const double radius = 2.0 * (hi - lo).norm();
  std::vector<Vec2> c;
  for (int k = 0; k < count; ++k) {
    // Offset by region id so neighbouring regions do not share source angles.
    const double phi = 2.0 * std::numbers::pi * (k + 0.37 * region) / count;
    c.push_back(centroid + radius * Vec2(std::cos(phi), std::sin(phi)));
  }
  return c;
}

double manufactured_u(const std::vector<Vec2>& sources, const Vec2& x) {
  double u = 0.0;
  for (const auto& c : sources) u += std::log((x - c).norm());
  return u;
}

namespace {

Vec2 manufactured_grad(const std::vector<Vec2>& sources, const Vec2& x) {
  Vec2 g = Vec2::Zero();
  for (const auto& c : sources) g += (x - c) / (x - c).squaredNorm();
  return g;
}

}  // namespace

ManufacturedReport manufactured_test(const CompositeMesh& mesh, const CornerRule& rule, const ManufacturedOptions& opt) {
  std::map<int, std::vector<Vec2>> src;
  for (const auto& r : mesh.regions())
    if (r.id != 0) src[r.id] = manufactured_sources(mesh, r.id, opt.sources_per_region);
  auto u = [&](int region, const Vec2& x) { return region == 0 ? 0.0 : manufactured_u(src.at(region), x); };
  auto dudn = [&](int region, const Vec2& x, const Vec2& n) {
    return region == 0 ? 0.0 : manufactured_grad(src.at(region), x).dot(n);
  };

  const NystromSystem sys = assemble_Kdir(mesh, rule, opt.disc);
  const EdgeFunction f = [&](int e, const Vec2& x) {
    const auto& ed = mesh.edges()[e];
    return mesh.region(ed.left_region).mu * u(ed.left_region, x) - mesh.region(ed.right_region).mu * u(ed.right_region, x);
  };
  const EdgeFunction g = [&](int e, const Vec2& x) {
    const auto& ed = mesh.edges()[e];
    return mesh.region(ed.left_region).nu * dudn(ed.left_region, x, ed.normal) -
           mesh.region(ed.right_region).nu * dudn(ed.right_region, x, ed.normal);
  };

  ManufacturedReport rep;
  rep.dofs = sys.size();
  rep.rule_hash = sys.rule_hash;
  const SolveResult sd = solve_dirichlet(sys, build_rhs_dirichlet(mesh, sys, f), opt.method, opt.tol);
  const SolveResult sn = solve_neumann_transpose(sys, build_rhs_neumann(mesh, sys, g), opt.method, opt.tol);
  rep.dirichlet = sd.report;
  rep.neumann = sn.report;

  const FieldSolution sol(mesh, sys, sd.x, sn.x);
  const auto bb = mesh.bounding_box();
  for (const auto& r : mesh.regions()) rep.region_max_err[r.id] = 0.0;
  for (int iy = 0; iy < opt.grid; ++iy)
    for (int ix = 0; ix < opt.grid; ++ix) {
      const Vec2 x(bb[0] + (bb[2] - bb[0]) * (ix + 0.5) / opt.grid, bb[1] + (bb[3] - bb[1]) * (iy + 0.5) / opt.grid);
      if (!is_far_from_boundary(sol, x)) continue;
      const int region = mesh.locate(x);
      const double err = std::abs(eval_field(sol, x, region) - u(region, x));
      rep.samples.push_back({x.x(), x.y(), region, err});
      rep.region_max_err[region] = std::max(rep.region_max_err[region], err);
      rep.max_err = std::max(rep.max_err, err);
      ++rep.targets;
    }
  return rep;
}

PolarizationResult polarization(const CompositeMesh& mesh, const CornerRule& rule, const DiscretizationOptions& disc,
                                SolveMethod method, double tol) {
  std::vector<Region> regs = mesh.regions();
  for (auto& r : regs) r.mu = 1.0;
  const CompositeMesh m = mesh.with_materials(regs);
  const NystromSystem sys = assemble_Kdir(m, rule, disc);
  PolarizationResult res;
  res.dofs = sys.size();
  res.rule_hash = sys.rule_hash;
  for (int dir = 0; dir < 2; ++dir) {
    const EdgeFunction g = [&](int e, const Vec2&) {
      const auto& ed = m.edges()[e];
      return (m.region(ed.left_region).nu - m.region(ed.right_region).nu) * ed.normal[dir];
    };
    const SolveResult s = solve_neumann_transpose(sys, build_rhs_neumann(m, sys, g), method, tol);
    res.reports[dir] = s.report;
    const Eigen::VectorXd wr = sys.sqrt_w.cwiseProduct(s.x);
    res.total_charge[dir] = wr.sum();
    for (int l = 0; l < 2; ++l) res.P(dir, l) = sys.nodes.row(l).dot(wr);
  }
  return res;
}

std::array<Region, 4> ab_materials(double a, double b, const AbSweepOptions& opt) {
  if (!(std::abs(a) < 1.0) || !(std::abs(b) < 1.0))
    throw DomainError("postproc", "ab_materials", "a and b must lie in (-1, 1)");
  const auto& mu = opt.mu;
  const double nu1 = opt.nu3 * mu[0] / mu[2] * (1.0 + a) / (1.0 - a);
  const double nu2 = opt.nu3 * mu[1] / mu[2] * (1.0 - b) / (1.0 + b);
  return {opt.exterior, Region{1, mu[0], nu1}, Region{2, mu[1], nu2}, Region{3, mu[2], opt.nu3}};
}

std::vector<AbRow> sweep_ab(const CompositeMesh& templ, const CornerRule& rule, const AbSweepOptions& opt) {
  if (opt.grid < 1) throw DomainError("postproc", "sweep_ab", "grid must be positive");
  const auto regs0 = ab_materials(0.0, 0.0, opt);
  const CompositeMesh base = templ.with_materials({regs0.begin(), regs0.end()});
  const NystromSystem sys0 = assemble_Kdir(base, rule, opt.disc);
  std::vector<AbRow> rows;
  for (int ia = 0; ia < opt.grid; ++ia)
    for (int ib = 0; ib < opt.grid; ++ib) {
      AbRow row;
      row.a = -1.0 + 2.0 * (ia + 0.5) / opt.grid;
      row.b = -1.0 + 2.0 * (ib + 0.5) / opt.grid;
      const auto regs = ab_materials(row.a, row.b, opt);
      const CompositeMesh m = templ.with_materials({regs.begin(), regs.end()});
      try {
        row.cond = condition_number(with_materials(sys0, m));
      } catch (const Error&) {
        row.cond = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(row);
    }
  return rows;
}

std::string angle_region(double theta1, double theta2) { return theta1 + theta2 < std::numbers::pi ? "IV" : "I"; }

CompositeMesh angle_template(double theta1, double theta2, const std::array<Region, 4>& regions, int panels_per_edge) {
  return angle_region(theta1, theta2) == "IV" ? junction_square_template(theta1, theta2, regions, panels_per_edge)
                                              : junction_disc_template(theta1, theta2, regions, panels_per_edge);
}

std::vector<AngleRow> sweep_angles(const CornerRule& rule, const AngleSweepOptions& opt) {
  if (opt.grid < 1) throw DomainError("postproc", "sweep_angles", "grid must be positive");
  const double pi = std::numbers::pi;
  const double guard = opt.disc.min_angle;
  std::vector<AngleRow> rows;
  for (int i = 0; i < opt.grid; ++i)
    for (int j = 0; j < opt.grid; ++j) {
      AngleRow row;
      row.theta1 = pi * (i + 0.5) / opt.grid;
      row.theta2 = pi * (j + 0.5) / opt.grid;
      const double theta3 = 2.0 * pi - row.theta1 - row.theta2;
      if (row.theta1 < guard || row.theta2 < guard || theta3 < guard) {
        row.region = "guard";
        row.cond = std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
        continue;
      }
      row.region = angle_region(row.theta1, row.theta2);
      const int ppe = opt.disc.panels_per_edge > 0 ? opt.disc.panels_per_edge : 3;
      const CompositeMesh m = angle_template(row.theta1, row.theta2, opt.regions, ppe);
      try {
        row.cond = condition_number(assemble_Kdir(m, rule, opt.disc));
      } catch (const DomainError&) {
        row.region = "guard";
        row.cond = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(row);
    }
  return rows;
}

}  // namespace trijunc
