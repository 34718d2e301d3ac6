#pragma once

#include "trijunc/corner_rule.hpp"
#include "trijunc/geometry.hpp"

#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace testutil {

using trijunc::Vec2;

struct E {
  int vs, ve, left, right, panels = 3;
};

inline trijunc::CompositeMesh mesh(std::vector<Vec2> v, std::vector<trijunc::Region> r, const std::vector<E>& e) {
  std::vector<trijunc::EdgeSpec> edges;
  for (std::size_t k = 0; k < e.size(); ++k) {
    trijunc::EdgeSpec s;
    s.id = static_cast<int>(k);
    s.v_start = e[k].vs;
    s.v_end = e[k].ve;
    s.left_region = e[k].left;
    s.right_region = e[k].right;
    s.panels_per_edge = e[k].panels;
    edges.push_back(s);
  }
  return trijunc::CompositeMesh(std::move(v), std::move(r), std::move(edges));
}

// Three unit spokes at angles 0, 2pi/3, 4pi/3 closed by an outer triangle.
// Region 1 lies between the spokes at 0 and 2pi/3, region 2 and 3 follow counterclockwise.
inline trijunc::CompositeMesh y_junction(const trijunc::Region& r1, const trijunc::Region& r2,
                                         const trijunc::Region& r3, int panels = 3) {
  std::vector<Vec2> v{Vec2(0, 0)};
  for (int k = 0; k < 3; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 3.0;
    v.emplace_back(std::cos(t), std::sin(t));
  }
  return mesh(v, {trijunc::Region{0, 1, 1}, r1, r2, r3},
              {{0, 1, 3, 1, panels}, {0, 2, 1, 2, panels}, {0, 3, 2, 3, panels},
               {1, 2, 0, 1, panels}, {2, 3, 0, 2, panels}, {3, 1, 0, 3, panels}});
}

// Unit square [0,1]^2 as a single region 1 with the given materials.
inline trijunc::CompositeMesh unit_square(double mu, double nu, int panels = 3) {
  return mesh({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}, {trijunc::Region{0, 1, 1}, trijunc::Region{1, mu, nu}},
              {{0, 1, 0, 1, panels}, {1, 2, 0, 1, panels}, {2, 3, 0, 1, panels}, {3, 0, 0, 1, panels}});
}

inline std::string geometry_path(const std::string& name) {
  return std::string(TRIJUNC_GEOMETRY_DIR) + "/" + name + ".json";
}

inline const trijunc::CornerRule& rule() { return trijunc::default_corner_rule(); }

}  // namespace testutil

namespace testutil {

// Generic junction at the origin: unit spokes at angles 0, theta1, theta1 + theta2 closed by
// an outer triangle. Region k lies counterclockwise after spoke k - 1.
inline trijunc::CompositeMesh spoke_junction(double theta1, double theta2, const trijunc::Region& r1,
                                             const trijunc::Region& r2, const trijunc::Region& r3, int panels = 3) {
  std::vector<Vec2> v{Vec2(0, 0)};
  for (double t : {0.0, theta1, theta1 + theta2}) v.emplace_back(std::cos(t), std::sin(t));
  return mesh(v, {trijunc::Region{0, 1, 1}, r1, r2, r3},
              {{0, 1, 3, 1, panels}, {0, 2, 1, 2, panels}, {0, 3, 2, 3, panels},
               {1, 2, 0, 1, panels}, {2, 3, 0, 2, panels}, {3, 1, 0, 3, panels}});
}

}  // namespace testutil
