#include "trijunc/errors.hpp"
#include "trijunc/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace trijunc {

namespace {

constexpr double kPi = std::numbers::pi;

EdgeSpec edge(int a, int b, int left, int right, int panels) {
  EdgeSpec e;
  e.v_start = a;
  e.v_end = b;
  e.left_region = left;
  e.right_region = right;
  e.panels_per_edge = panels;
  return e;
}

std::array<double, 3> spoke_angles(double theta1, double theta2) {
  const double theta3 = 2.0 * kPi - theta1 - theta2;
  const double phi31 = -0.5 * kPi + 0.5 * theta3;
  return {phi31, phi31 + theta1, phi31 + theta1 + theta2};  // 31, 12, 23
}

// Star of three spokes from the origin to the given outer points, closed by an outer
// polygon. outer[k] lists the boundary points strictly between spoke k and spoke k+1.
CompositeMesh star_template(const std::array<Vec2, 3>& tips, const std::array<std::vector<Vec2>, 3>& between,
                            const std::array<Region, 4>& regions, int panels) {
  std::vector<Vec2> verts{Vec2::Zero()};
  std::array<int, 3> tip_id{};
  for (int k = 0; k < 3; ++k) {
    tip_id[k] = static_cast<int>(verts.size());
    verts.push_back(tips[k]);
  }
  // Sector k (between spoke k and spoke k+1) is region 1, 2, 3 for k = 0, 1, 2.
  const std::array<int, 3> sector_region{1, 2, 3};
  std::vector<EdgeSpec> edges;
  for (int k = 0; k < 3; ++k) {
    const int before = sector_region[(k + 2) % 3];
    const int after = sector_region[k];
    edges.push_back(edge(0, tip_id[k], before, after, panels));
  }
  for (int k = 0; k < 3; ++k) {
    int prev = tip_id[k];
    for (const auto& p : between[k]) {
      const int id = static_cast<int>(verts.size());
      verts.push_back(p);
      edges.push_back(edge(prev, id, 0, sector_region[k], panels));
      prev = id;
    }
    edges.push_back(edge(prev, tip_id[(k + 1) % 3], 0, sector_region[k], panels));
  }
  return CompositeMesh(verts, {regions.begin(), regions.end()}, edges);
}

void check_angles(double theta1, double theta2, const char* op) {
  const double theta3 = 2.0 * kPi - theta1 - theta2;
  if (!(theta1 > 0.0) || !(theta2 > 0.0) || !(theta3 > 0.0))
    throw DomainError("postproc", op, "angles must be positive and sum to less than 2 pi");
}

}  // namespace

CompositeMesh mirror_x(const CompositeMesh& mesh) {
  std::vector<Vec2> v = mesh.vertices();
  for (auto& p : v) p.x() = -p.x();
  std::vector<EdgeSpec> e = mesh.edges();
  for (auto& ed : e) std::swap(ed.left_region, ed.right_region);
  return CompositeMesh(v, mesh.regions(), e);
}

CompositeMesh translate(const CompositeMesh& mesh, const Vec2& shift) {
  std::vector<Vec2> v = mesh.vertices();
  for (auto& p : v) p += shift;
  return CompositeMesh(v, mesh.regions(), mesh.edges());
}

CompositeMesh junction_disc_template(double theta1, double theta2, const std::array<Region, 4>& regions, int panels) {
  check_angles(theta1, theta2, "junction_disc_template");
  const auto phi = spoke_angles(theta1, theta2);
  std::array<Vec2, 3> tips;
  std::array<std::vector<Vec2>, 3> between;
  for (int k = 0; k < 3; ++k) tips[k] = Vec2(std::cos(phi[k]), std::sin(phi[k]));
  for (int k = 0; k < 3; ++k) {
    const double start = phi[k];
    const double span = k < 2 ? phi[k + 1] - phi[k] : phi[0] + 2.0 * kPi - phi[2];
    const int m = std::max(1, static_cast<int>(std::ceil(span / (kPi / 3.0) - 1e-12)));
    for (int q = 1; q < m; ++q) {
      const double a = start + span * q / m;
      between[k].emplace_back(std::cos(a), std::sin(a));
    }
  }
  return star_template(tips, between, regions, panels);
}

CompositeMesh junction_square_template(double theta1, double theta2, const std::array<Region, 4>& regions, int panels) {
  check_angles(theta1, theta2, "junction_square_template");
  const auto phi = spoke_angles(theta1, theta2);
  std::array<Vec2, 3> tips;
  std::array<std::vector<Vec2>, 3> between;
  for (int k = 0; k < 3; ++k) {
    const Vec2 d(std::cos(phi[k]), std::sin(phi[k]));
    tips[k] = d / std::max(std::abs(d.x()), std::abs(d.y()));
  }
  // Square corners sit at angles pi/4 + j pi/2; assign each to the sector containing it.
  for (int k = 0; k < 3; ++k) {
    const double start = phi[k];
    const double span = k < 2 ? phi[k + 1] - phi[k] : phi[0] + 2.0 * kPi - phi[2];
    std::vector<std::pair<double, Vec2>> pts;
    for (int j = 0; j < 4; ++j) {
      const double a = 0.25 * kPi + 0.5 * kPi * j;
      double rel = std::fmod(a - start, 2.0 * kPi);
      if (rel < 0) rel += 2.0 * kPi;
      if (rel > 1e-9 && rel < span - 1e-9)
        pts.emplace_back(rel, Vec2(std::cos(a) > 0 ? 1.0 : -1.0, std::sin(a) > 0 ? 1.0 : -1.0));
    }
    std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [rel, p] : pts) between[k].push_back(p);
  }
  return star_template(tips, between, regions, panels);
}

LatticeResult lattice_generator(const LatticeOptions& opt) {
  const std::string op = "lattice_generator";
  if (opt.cells_across < 1 || opt.cells_across % 2 == 0)
    throw DomainError("postproc", op, "cells_across must be a positive odd number");
  if (!(opt.perturbation >= 0.0 && opt.perturbation <= 0.3))
    throw DomainError("postproc", op, "perturbation fraction must lie in [0, 0.3]");
  if (!(opt.eps_lo <= opt.eps_hi)) throw DomainError("postproc", op, "empty permittivity exponent range");

  const int R = opt.cells_across / 2;
  // Pointy-top hexagons in axial coordinates, side length 1 before scaling.
  std::vector<Vec2> centers;
  for (int q = -R; q <= R; ++q)
    for (int r = std::max(-R, -q - R); r <= std::min(R, -q + R); ++r)
      centers.emplace_back(std::sqrt(3.0) * (q + 0.5 * r), 1.5 * r);

  std::vector<Vec2> verts;
  std::map<std::pair<long, long>, int> vid;
  auto vertex_id = [&](const Vec2& p) {
    const auto key = std::make_pair(std::lround(p.x() * 1e6), std::lround(p.y() * 1e6));
    auto it = vid.find(key);
    if (it != vid.end()) return it->second;
    const int id = static_cast<int>(verts.size());
    verts.push_back(p);
    vid.emplace(key, id);
    return id;
  };
  std::vector<EdgeSpec> edges;
  std::map<std::pair<int, int>, int> eid;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    std::array<int, 6> ids{};
    for (int k = 0; k < 6; ++k) {
      const double a = kPi / 6.0 + kPi / 3.0 * k;
      ids[k] = vertex_id(centers[c] + Vec2(std::cos(a), std::sin(a)));
    }
    const int cell = static_cast<int>(c) + 1;
    for (int k = 0; k < 6; ++k) {
      const int a = ids[k], b = ids[(k + 1) % 6];
      auto it = eid.find({std::min(a, b), std::max(a, b)});
      if (it == eid.end()) {
        eid[{std::min(a, b), std::max(a, b)}] = static_cast<int>(edges.size());
        edges.push_back(edge(a, b, 0, cell, opt.panels_per_edge));
      } else {
        edges[it->second].left_region = cell;
      }
    }
  }

  // Fit into the unit square.
  Vec2 lo = verts[0], hi = verts[0];
  for (const auto& v : verts) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double scale = 1.0 / (hi - lo).maxCoeff();
  const Vec2 mid = 0.5 * (lo + hi);
  for (auto& v : verts) v = Vec2(0.5, 0.5) + scale * (v - mid);
  const double side = scale;

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Region> regions{Region{0, 1.0, 1.0}};
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double e = opt.eps_lo + (opt.eps_hi - opt.eps_lo) * unif(rng);
    regions.push_back(Region{static_cast<int>(c) + 1, 1.0, std::pow(10.0, e)});
  }
  std::vector<double> dirs(verts.size());
  for (auto& d : dirs) d = 2.0 * kPi * unif(rng);

  LatticeResult res;
  double frac = opt.perturbation;
  for (int attempt = 1; attempt <= 8; ++attempt, frac *= 0.5) {
    std::vector<Vec2> pv = verts;
    for (std::size_t k = 0; k < pv.size(); ++k) pv[k] += frac * side * Vec2(std::cos(dirs[k]), std::sin(dirs[k]));
    try {
      CompositeMesh m(pv, regions, edges);
      if (m.has_crossings()) continue;
      res.mesh = std::move(m);
      res.perturbation_used = frac;
      res.attempts = attempt;
      return res;
    } catch (const ValidationError&) {
      continue;
    }
  }
  throw ValidationError("postproc", op, "could not produce a non-intersecting lattice");
}

}  // namespace trijunc
