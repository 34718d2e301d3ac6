#include "doctest.h"
#include "test_util.hpp"

#include "trijunc/errors.hpp"
#include "trijunc/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace trijunc;
using testutil::E;
using testutil::mesh;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("edge normal follows the perp convention") {
  // Clockwise triangle: the interior lies to the right of (0,0) -> (1,0).
  const auto m = mesh({Vec2(0, 0), Vec2(1, 0), Vec2(0.5, -1)}, {Region{0, 1, 1}, Region{1, 2, 3}},
                      {{0, 1, 1, 0}, {1, 2, 1, 0}, {2, 0, 1, 0}});
  const auto& e = m.edges()[0];
  CHECK(e.normal.x() == doctest::Approx(0.0));
  CHECK(e.normal.y() == doctest::Approx(-1.0));
  CHECK(e.length == doctest::Approx(1.0));
  for (const auto& ed : m.edges()) {
    const Vec2 d = m.vertices()[ed.v_end] - m.vertices()[ed.v_start];
    CHECK(std::abs(ed.normal.dot(d)) < 1e-15);
    CHECK(d.x() * ed.normal.y() - d.y() * ed.normal.x() < 0.0);
    CHECK(std::abs(ed.normal.norm() - 1.0) < 1e-15);
  }
}

TEST_CASE("bundled two-triangle geometry") {
  const auto m = load_geometry_file(testutil::geometry_path("two_triangle"));
  CHECK(m.vertices().size() == 7);
  CHECK(m.edges().size() == 8);
  CHECK(m.regions().size() == 3);
  CHECK(m.junctions().size() == 2);
  CHECK(detect_junctions(m).size() == 2);
  CHECK(m.region_area(1) > 0.0);
  CHECK(m.region_area(2) > 0.0);
  CHECK_FALSE(m.has_crossings());
}

TEST_CASE("bundled diamond geometry") {
  const auto m = load_geometry_file(testutil::geometry_path("diamond"));
  CHECK(m.regions().size() == 5);
  CHECK(m.junctions().size() >= 3);
  for (const auto& j : m.junctions())
    CHECK(std::abs(j.angles[0] + j.angles[1] + j.angles[2] - 2 * kPi) < 1e-13);
}

TEST_CASE("validation errors") {
  const std::vector<Region> regs{Region{0, 1, 1}, Region{1, 1, 2}, Region{2, 2, 1}};
  SUBCASE("vertex with four edges") {
    // Two triangles touching at a single vertex.
    CHECK_THROWS_AS(mesh({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(-1, 0), Vec2(-1, -1)}, regs,
                         {{0, 1, 0, 1}, {1, 2, 0, 1}, {2, 0, 0, 1}, {0, 3, 0, 2}, {3, 4, 0, 2}, {4, 0, 0, 2}}),
                    ValidationError);
  }
  SUBCASE("dangling region id") {
    CHECK_THROWS_AS(mesh({Vec2(0, 0), Vec2(1, 0), Vec2(0.5, -1)}, regs, {{0, 1, 7, 0}, {1, 2, 1, 0}, {2, 0, 1, 0}}),
                    ValidationError);
  }
  SUBCASE("zero-length edge") {
    CHECK_THROWS_AS(mesh({Vec2(0, 0), Vec2(1, 0), Vec2(0.5, -1)}, regs, {{0, 0, 1, 0}, {1, 2, 1, 0}, {2, 0, 1, 0}}),
                    ValidationError);
  }
  SUBCASE("dangling edge end") {
    CHECK_THROWS_AS(mesh({Vec2(0, 0), Vec2(1, 0)}, regs, {{0, 1, 1, 0}}), ValidationError);
  }
  SUBCASE("wrong orientation") {
    CHECK_THROWS_AS(mesh({Vec2(0, 0), Vec2(1, 0), Vec2(0.5, -1)}, regs, {{0, 1, 0, 1}, {1, 2, 0, 1}, {2, 0, 0, 1}}),
                    ValidationError);
  }
  SUBCASE("coincident vertices") {
    CHECK_THROWS_AS(mesh({Vec2(0, 0), Vec2(1, 0), Vec2(0.5, -1), Vec2(1, 0)}, regs,
                         {{0, 1, 1, 0}, {1, 2, 1, 0}, {2, 0, 1, 0}}),
                    ValidationError);
  }
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(load_geometry("{not json"), ParseError);
  CHECK_THROWS_AS(load_geometry(R"({"vertices": []})"), ParseError);
  CHECK_THROWS_AS(load_geometry(R"({"vertices": [[0]], "regions": [], "edges": []})"), ParseError);
  CHECK_THROWS_AS(load_geometry_file("/nonexistent/geometry.json"), ParseError);
}

TEST_CASE("geometry dump round trip") {
  const auto m = load_geometry_file(testutil::geometry_path("two_triangle"));
  const auto m2 = load_geometry(dump_geometry(m));
  CHECK(dump_geometry(m2) == dump_geometry(m));
  REQUIRE(m2.edges().size() == m.edges().size());
  for (std::size_t k = 0; k < m.edges().size(); ++k) CHECK((m2.edges()[k].normal - m.edges()[k].normal).norm() == 0.0);
}

TEST_CASE("symmetric junction with equal media") {
  const Region one1{1, 1, 1}, one2{2, 1, 1}, one3{3, 1, 1};
  const auto m = testutil::y_junction(one1, one2, one3);
  // The centre and the three outer tips each have three incident edges.
  REQUIRE(m.junctions().size() == 4);
  const auto& j = m.junctions()[0];
  CHECK(j.vertex == 0);
  for (double t : j.angles) CHECK(t == doctest::Approx(2 * kPi / 3).epsilon(1e-14));
  for (double d : j.materials) CHECK(d == 0.0);
  CHECK(m.corners().size() == 4);
}

TEST_CASE("junction materials from the sector formula") {
  const auto m = testutil::y_junction(Region{1, 1, 2}, Region{2, 1, 1}, Region{3, 1, 1});
  const auto& j = m.junctions()[0];
  REQUIRE(j.vertex == 0);
  // Each region k sits between edges[k-1] and edges[k]; check the frame labels against the regions.
  std::array<double, 3> d{};  // d(1,2), d(2,3), d(3,1) in the frame labelling
  for (int k = 0; k < 3; ++k) {
    const Region& ri = m.region(j.regions[k]);
    const Region& rj = m.region(j.regions[(k + 1) % 3]);
    d[k] = (ri.mu * rj.nu - rj.mu * ri.nu) / (ri.mu * rj.nu + rj.mu * ri.nu);
  }
  CHECK(j.materials[1] == doctest::Approx(d[0]).epsilon(1e-15));
  CHECK(j.materials[2] == doctest::Approx(d[1]).epsilon(1e-15));
  CHECK(j.materials[0] == doctest::Approx(d[2]).epsilon(1e-15));
  // With region 1 at frame position 1 the values are d12 = -1/3, d23 = 0, d31 = 1/3.
  CHECK(sector_coefficient(Region{1, 1, 2}, Region{2, 1, 1}) == doctest::Approx(-1.0 / 3.0));
  CHECK(sector_coefficient(Region{2, 1, 1}, Region{3, 1, 1}) == 0.0);
  CHECK(sector_coefficient(Region{3, 1, 1}, Region{1, 1, 2}) == doctest::Approx(1.0 / 3.0));
  int pos = -1;
  for (int k = 0; k < 3; ++k)
    if (j.regions[k] == 1) pos = k;
  REQUIRE(pos >= 0);
  // The region labelled 1 sits between the spokes at 0 and 2pi/3.
  CHECK(j.angles[pos] == doctest::Approx(2 * kPi / 3));
}

TEST_CASE("c identity over random materials") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    Region r[3];
    for (int k = 0; k < 3; ++k) r[k] = Region{k + 1, u(gen), u(gen)};
    const double a = sector_coefficient(r[2], r[0]);
    const double b = sector_coefficient(r[0], r[1]);
    const double c = sector_coefficient(r[1], r[2]);
    worst = std::max(worst, std::abs(c + (a + b) / (1 + a * b)));
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("edge coefficient and transmission coefficient agree") {
  const auto m = load_geometry_file(testutil::geometry_path("two_triangle"));
  for (std::size_t k = 0; k < m.edges().size(); ++k) {
    const auto& e = m.edges()[k];
    const Region& l = m.region(e.left_region);
    const Region& r = m.region(e.right_region);
    CHECK(m.edge_coefficient(static_cast<int>(k)) ==
          doctest::Approx((r.mu * l.nu - l.mu * r.nu) / (r.mu * l.nu + l.mu * r.nu)));
  }
}

TEST_CASE("point location") {
  const auto m = load_geometry_file(testutil::geometry_path("two_triangle"));
  // Interior points are found by nudging along each edge normal from its midpoint.
  for (const auto& e : m.edges()) {
    const Vec2 mid = 0.5 * (m.vertices()[e.v_start] + m.vertices()[e.v_end]);
    CHECK(m.locate(mid + 1e-3 * e.normal) == e.left_region);
    CHECK(m.locate(mid - 1e-3 * e.normal) == e.right_region);
  }
  CHECK(m.locate(Vec2(50, 50)) == 0);
}

TEST_CASE("with_materials keeps geometry") {
  const auto m = load_geometry_file(testutil::geometry_path("two_triangle"));
  const auto m2 = m.with_materials({Region{0, 1, 1}, Region{1, 1, 1}, Region{2, 1, 1}});
  for (std::size_t k = 0; k < m.edges().size(); ++k) CHECK(m2.edge_coefficient(static_cast<int>(k)) == 0.0);
  CHECK(m2.vertices() == m.vertices());
}
