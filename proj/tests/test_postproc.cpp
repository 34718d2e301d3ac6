#include "doctest.h"
#include "test_util.hpp"

#include "trijunc/errors.hpp"
#include "trijunc/postproc.hpp"

#include <cmath>
#include <numbers>

using namespace trijunc;

namespace {
constexpr double kPi = std::numbers::pi;

const CompositeMesh& two_triangle() {
  static const CompositeMesh m = load_geometry_file(testutil::geometry_path("two_triangle"));
  return m;
}

ManufacturedOptions opts(int panels, int order = 16) {
  ManufacturedOptions o;
  o.disc.panels_per_edge = panels;
  o.disc.smooth_order = order;
  o.grid = 30;
  return o;
}

LatticeOptions seven_cells(std::uint64_t seed, int panels = 3) {
  LatticeOptions o;
  o.cells_across = 3;
  o.seed = seed;
  o.panels_per_edge = panels;
  return o;
}
}  // namespace

TEST_CASE("zero densities evaluate to zero") {
  const auto sys = assemble_Kdir(two_triangle(), testutil::rule());
  const FieldSolution sol(two_triangle(), sys, Eigen::VectorXd::Zero(sys.size()), Eigen::VectorXd::Zero(sys.size()));
  CHECK(eval_field(sol, Vec2(-0.4, 0.5), 1) == 0.0);
  CHECK(eval_field(sol, Vec2(5, 5), 0) == 0.0);
  CHECK_THROWS_AS(eval_field(sol, Vec2(-0.4, 0.5), 2), DomainError);
  CHECK_THROWS_AS(eval_field(sol, Vec2(-0.4, 0.1001), 1), DomainError);
  CHECK_THROWS_AS(FieldSolution(two_triangle(), sys, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)), SizeError);
}

TEST_CASE("manufactured solution on the two-triangle geometry") {
  const auto rep = manufactured_test(two_triangle(), testutil::rule(), opts(3));
  CHECK(rep.max_err <= 1e-10);
  CHECK(rep.targets > 50);
  CHECK(rep.region_max_err.size() == 3);
  for (const auto& [region, err] : rep.region_max_err) CHECK(err <= 1e-10);
  CHECK(rep.dirichlet.iterations <= 100);
  CHECK(rep.neumann.iterations <= 100);
  CHECK(rep.dirichlet.residual <= 5e-15);
}

TEST_CASE("manufactured solution with identical media") {
  const auto m = two_triangle().with_materials({Region{0, 1, 1}, Region{1, 1, 1}, Region{2, 1, 1}});
  const auto rep = manufactured_test(m, testutil::rule(), opts(3));
  CHECK(rep.max_err <= 1e-12);
}

TEST_CASE("manufactured solution on the diamond geometry") {
  const auto m = load_geometry_file(testutil::geometry_path("diamond"));
  const auto rep = manufactured_test(m, testutil::rule(), opts(3));
  CHECK(rep.max_err <= 1e-10);
}

TEST_CASE("self-convergence under refinement") {
  // Raising the smooth order at a fixed panel layout shrinks the error fast.
  const auto q4 = manufactured_test(two_triangle(), testutil::rule(), opts(3, 4));
  const auto q8 = manufactured_test(two_triangle(), testutil::rule(), opts(3, 8));
  CHECK(q4.max_err / q8.max_err >= 1e3);
  // Splitting panels at high order stays at the converged level.
  const auto fine = manufactured_test(two_triangle(), testutil::rule(), opts(6));
  CHECK(fine.max_err <= 1e-10);
}

TEST_CASE("far field of the exterior solution") {
  const auto& m = two_triangle();
  const auto& rule = testutil::rule();
  const auto sys = assemble_Kdir(m, rule);
  // Same data as the manufactured test, solved directly.
  std::vector<std::vector<Vec2>> src(m.regions().size());
  for (const auto& r : m.regions())
    if (r.id != 0) src[r.id] = manufactured_sources(m, r.id, 10);
  auto u = [&](int reg, const Vec2& x) { return reg == 0 ? 0.0 : manufactured_u(src[reg], x); };
  auto grad = [&](int reg, const Vec2& x) {
    Vec2 g = Vec2::Zero();
    if (reg != 0)
      for (const auto& c : src[reg]) g += (x - c) / (x - c).squaredNorm();
    return g;
  };
  auto f = [&](int e, const Vec2& x) {
    const auto& ed = m.edges()[e];
    return m.region(ed.left_region).mu * u(ed.left_region, x) - m.region(ed.right_region).mu * u(ed.right_region, x);
  };
  auto g = [&](int e, const Vec2& x) {
    const auto& ed = m.edges()[e];
    return m.region(ed.left_region).nu * grad(ed.left_region, x).dot(ed.normal) -
           m.region(ed.right_region).nu * grad(ed.right_region, x).dot(ed.normal);
  };
  const auto sigma = solve_dirichlet(sys, build_rhs_dirichlet(m, sys, f));
  const auto rho = solve_neumann_transpose(sys, build_rhs_neumann(m, sys, g));
  const FieldSolution sol(m, sys, sigma.x, rho.x);
  CHECK(std::abs(rho.x.dot(sys.sqrt_w)) <= 1e-12);
  const double near = std::abs(eval_field(sol, Vec2(30, 0), 0));
  const double far = std::abs(eval_field(sol, Vec2(1e4, 0), 0));
  CHECK(near <= 1e-11);
  CHECK(far <= 1e-11);
}

TEST_CASE("polarization: equal permittivities") {
  auto lat = lattice_generator(seven_cells(3));
  std::vector<Region> regs = lat.mesh.regions();
  for (auto& r : regs) r.nu = 2.0, r.mu = 1.0;
  const auto res = polarization(lat.mesh.with_materials(regs), testutil::rule());
  CHECK(res.P.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("polarization: symmetry, refinement and translation") {
  const auto lat = lattice_generator(seven_cells(7));
  DiscretizationOptions coarse, fine;
  coarse.panels_per_edge = 3;
  fine.panels_per_edge = 5;
  const auto pc = polarization(lat.mesh, testutil::rule(), coarse);
  const auto pf = polarization(lat.mesh, testutil::rule(), fine);
  CHECK(std::abs(pc.P(0, 1) - pc.P(1, 0)) <= 1e-10);
  CHECK((pc.P - pf.P).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(pc.P.cwiseAbs().maxCoeff() > 1e-3);
  for (double q : pc.total_charge) CHECK(std::abs(q) <= 1e-12);
  const auto pt = polarization(translate(lat.mesh, Vec2(3.5, -1.25)), testutil::rule(), coarse);
  CHECK((pc.P - pt.P).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(pc.reports[0].iterations <= 100);
}

TEST_CASE("lattice generator") {
  SUBCASE("regular lattice") {
    auto o = seven_cells(1);
    o.perturbation = 0.0;
    const auto lat = lattice_generator(o);
    CHECK(lat.mesh.regions().size() == 8);
    CHECK_FALSE(lat.mesh.junctions().empty());
    for (const auto& j : lat.mesh.junctions())
      for (double t : j.angles) CHECK(t == doctest::Approx(2 * kPi / 3).epsilon(1e-12));
    const auto bb = lat.mesh.bounding_box();
    CHECK(bb[0] >= 0.0);
    CHECK(bb[3] <= 1.0);
  }
  SUBCASE("determinism") {
    const auto a = lattice_generator(seven_cells(11)), b = lattice_generator(seven_cells(11));
    CHECK(dump_geometry(a.mesh) == dump_geometry(b.mesh));
    const auto c = lattice_generator(seven_cells(12));
    CHECK(dump_geometry(a.mesh) != dump_geometry(c.mesh));
    for (const auto& r : a.mesh.regions())
      if (r.id != 0) {
        CHECK(r.nu >= 0.1);
        CHECK(r.nu <= 10.0);
      }
  }
  SUBCASE("argument checks") {
    auto o = seven_cells(1);
    o.perturbation = 0.5;
    CHECK_THROWS_AS(lattice_generator(o), DomainError);
    o.perturbation = 0.1;
    o.cells_across = 4;
    CHECK_THROWS_AS(lattice_generator(o), DomainError);
  }
}

TEST_CASE("(a, b) materials") {
  AbSweepOptions o;
  const auto r = ab_materials(0.3, -0.4, o);
  CHECK(sector_coefficient(r[3], r[1]) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(sector_coefficient(r[2], r[3]) == doctest::Approx(-0.4).epsilon(1e-14));
  const auto z = ab_materials(0.0, 0.0, o);
  for (int k = 1; k <= 3; ++k) CHECK(z[k].nu / z[k].mu == doctest::Approx(o.nu3 / o.mu[2]));
  CHECK_THROWS_AS(ab_materials(1.0, 0.0, o), DomainError);
}

TEST_CASE("(a, b) sweep") {
  AbSweepOptions o;
  o.grid = 3;
  o.disc.panels_per_edge = 2;
  const auto templ = junction_disc_template(kPi / std::sqrt(2.0), kPi / std::sqrt(3.0), ab_materials(0, 0, o), 2);
  const auto rows = sweep_ab(templ, testutil::rule(), o);
  REQUIRE(rows.size() == 9);
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.cond));
    CHECK(r.cond >= 1.0);
  }
  CHECK(rows[4].a == 0.0);
  CHECK(rows[4].b == 0.0);
  CHECK(rows[4].cond < 10.0);
}

TEST_CASE("angle templates and mirror symmetry") {
  AngleSweepOptions o;
  const double t1 = 1.9, t2 = 2.6;
  const auto a = angle_template(t1, t2, o.regions, 2);
  // Mirror of template(t1, t2) is template(t2, t1) with regions 1 and 2 exchanged.
  auto swapped = o.regions;
  std::swap(swapped[1].mu, swapped[2].mu);
  std::swap(swapped[1].nu, swapped[2].nu);
  const auto b = angle_template(t2, t1, swapped, 2);
  const auto ma = mirror_x(a);
  const auto& rule = testutil::rule();
  const double ca = condition_number(assemble_Kdir(a, rule));
  const double cb = condition_number(assemble_Kdir(b, rule));
  const double cm = condition_number(assemble_Kdir(ma, rule));
  CHECK(cb == doctest::Approx(ca).epsilon(1e-8));
  CHECK(cm == doctest::Approx(ca).epsilon(1e-8));
  CHECK(angle_region(2.0, 2.0) == "I");
  CHECK(angle_region(1.0, 1.0) == "IV");
  const double c0 = condition_number(assemble_Kdir(angle_template(2 * kPi / 3, 2 * kPi / 3, o.regions, 2), rule));
  CHECK(std::isfinite(c0));
  CHECK(c0 < 10.0);
}

TEST_CASE("angle sweep") {
  AngleSweepOptions o;
  o.grid = 4;
  o.disc.panels_per_edge = 2;
  const auto rows = sweep_angles(testutil::rule(), o);
  CHECK(rows.size() == 16);
  int computed = 0;
  for (const auto& r : rows) {
    if (r.region == "guard") {
      CHECK(std::isnan(r.cond));
      continue;
    }
    ++computed;
    CHECK(r.cond < 10.0);
  }
  CHECK(computed > 0);
}
