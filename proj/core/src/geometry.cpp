#include "trijunc/geometry.hpp"

#include "trijunc/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace trijunc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCoincidenceTol = 1e-12;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

[[noreturn]] void invalid(const std::string& op, const std::string& msg) {
  throw ValidationError("geometry", op, msg);
}

// Region on the counterclockwise side of edge e, seen as leaving `vertex`.
int ccw_region(const EdgeSpec& e, int vertex) {
  return e.v_start == vertex ? e.right_region : e.left_region;
}
int cw_region(const EdgeSpec& e, int vertex) {
  return e.v_start == vertex ? e.left_region : e.right_region;
}

int orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  const double scale = (b - a).norm() * (c - a).norm();
  if (std::abs(v) <= 1e-14 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) - 1e-14 <= p.x() && p.x() <= std::max(a.x(), b.x()) + 1e-14 &&
         std::min(a.y(), b.y()) - 1e-14 <= p.y() && p.y() <= std::max(a.y(), b.y()) + 1e-14;
}

}  // namespace

double sector_coefficient(const Region& ri, const Region& rj) {
  return (ri.mu * rj.nu - rj.mu * ri.nu) / (ri.mu * rj.nu + rj.mu * ri.nu);
}

double transmission_coefficient(const Region& left, const Region& right) {
  return (right.mu * left.nu - left.mu * right.nu) / (right.mu * left.nu + left.mu * right.nu);
}

CompositeMesh::CompositeMesh(std::vector<Vec2> vertices, std::vector<Region> regions,
                             std::vector<EdgeSpec> edges)
    : vertices_(std::move(vertices)), regions_(std::move(regions)), edges_(std::move(edges)) {
  const std::string op = "load_geometry";
  const int nv = static_cast<int>(vertices_.size());
  if (nv == 0) invalid(op, "no vertices");
  for (const auto& v : vertices_)
    if (!std::isfinite(v.x()) || !std::isfinite(v.y())) invalid(op, "non-finite vertex coordinate");
  // Coincident vertices: sort by x and compare neighbours within the tolerance window.
  {
    std::vector<int> order(nv);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return vertices_[a].x() < vertices_[b].x(); });
    for (int i = 0; i < nv; ++i)
      for (int j = i + 1; j < nv && vertices_[order[j]].x() - vertices_[order[i]].x() <= kCoincidenceTol; ++j)
        if ((vertices_[order[i]] - vertices_[order[j]]).norm() <= kCoincidenceTol)
          invalid(op, "vertices " + std::to_string(order[i]) + " and " + std::to_string(order[j]) +
                          " coincide");
  }

  int max_id = 0;
  for (const auto& r : regions_) {
    if (r.id < 0) invalid(op, "negative region id");
    if (!(r.mu > 0.0) || !(r.nu > 0.0) || !std::isfinite(r.mu) || !std::isfinite(r.nu))
      invalid(op, "region " + std::to_string(r.id) + " needs positive mu and nu");
    max_id = std::max(max_id, r.id);
  }
  region_index_.assign(max_id + 1, -1);
  for (std::size_t k = 0; k < regions_.size(); ++k) {
    if (region_index_[regions_[k].id] >= 0) invalid(op, "duplicate region id " + std::to_string(regions_[k].id));
    region_index_[regions_[k].id] = static_cast<int>(k);
  }
  if (region_index_[0] < 0) invalid(op, "exterior region 0 is required");

  incident_.assign(nv, {});
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    EdgeSpec& e = edges_[k];
    e.id = static_cast<int>(k);
    if (e.v_start < 0 || e.v_start >= nv || e.v_end < 0 || e.v_end >= nv)
      invalid(op, "edge " + std::to_string(k) + " references a missing vertex");
    if (e.v_start == e.v_end) invalid(op, "edge " + std::to_string(k) + " has zero length");
    if (!has_region(e.left_region) || !has_region(e.right_region))
      invalid(op, "edge " + std::to_string(k) + " references a missing region");
    if (e.left_region == e.right_region)
      invalid(op, "edge " + std::to_string(k) + " has the same region on both sides");
    if (e.panels_per_edge < 1) invalid(op, "edge " + std::to_string(k) + " needs at least one panel");
    const Vec2 d = vertices_[e.v_end] - vertices_[e.v_start];
    e.length = d.norm();
    if (!(e.length > kCoincidenceTol)) invalid(op, "edge " + std::to_string(k) + " has zero length");
    e.tangent = d / e.length;
    e.normal = Vec2(e.tangent.y(), -e.tangent.x());
    incident_[e.v_start].push_back(e.id);
    incident_[e.v_end].push_back(e.id);
  }

  for (int v = 0; v < nv; ++v) {
    const auto& inc = incident_[v];
    if (inc.size() > 3)
      invalid(op, "vertex " + std::to_string(v) + " has " + std::to_string(inc.size()) +
                      " incident edges (at most 3 allowed)");
    if (inc.size() == 1) invalid(op, "vertex " + std::to_string(v) + " is a dangling edge end");
    for (std::size_t i = 0; i < inc.size(); ++i)
      for (std::size_t j = i + 1; j < inc.size(); ++j) {
        const auto& a = edges_[inc[i]];
        const auto& b = edges_[inc[j]];
        const int oa = a.v_start == v ? a.v_end : a.v_start;
        const int ob = b.v_start == v ? b.v_end : b.v_start;
        if (oa == ob) invalid(op, "duplicate edge between vertices " + std::to_string(v) + " and " + std::to_string(oa));
      }
    if (inc.size() < 2) continue;

    Corner c;
    c.vertex = v;
    std::vector<std::pair<double, int>> dirs;
    for (int e : inc) {
      const auto& ed = edges_[e];
      const Vec2 out = ed.v_start == v ? ed.tangent : Vec2(-ed.tangent);
      double phi = std::atan2(out.y(), out.x());
      if (phi < 0) phi += kTwoPi;
      dirs.emplace_back(phi, e);
    }
    std::sort(dirs.begin(), dirs.end());
    const int m = static_cast<int>(dirs.size());
    for (int k = 0; k < m; ++k) {
      c.edges.push_back(dirs[k].second);
      double ang = (k + 1 < m ? dirs[k + 1].first : dirs[0].first + kTwoPi) - dirs[k].first;
      c.angles.push_back(ang);
    }
    for (int k = 0; k < m; ++k) {
      const auto& e0 = edges_[c.edges[k]];
      const auto& e1 = edges_[c.edges[(k + 1) % m]];
      if (ccw_region(e0, v) != cw_region(e1, v))
        invalid(op, "inconsistent region labels around vertex " + std::to_string(v));
      if (!(c.angles[k] > 0.0)) invalid(op, "overlapping edges at vertex " + std::to_string(v));
    }
    if (m == 3) {
      Junction j;
      j.vertex = v;
      for (int k = 0; k < 3; ++k) {
        j.edges[k] = c.edges[k];
        j.angles[k] = c.angles[k];
        j.regions[k] = ccw_region(edges_[c.edges[k]], v);
      }
      const Region& r1 = region(j.regions[0]);
      const Region& r2 = region(j.regions[1]);
      const Region& r3 = region(j.regions[2]);
      j.materials = {sector_coefficient(r3, r1), sector_coefficient(r1, r2), sector_coefficient(r2, r3)};
      junctions_.push_back(j);
    }
    corners_.push_back(std::move(c));
  }

  // Orientation and closure: every interior region must enclose positive area.
  for (const auto& r : regions_) {
    if (r.id == 0) continue;
    bool used = false;
    for (const auto& e : edges_) used = used || e.left_region == r.id || e.right_region == r.id;
    if (!used) continue;
    const double area = region_area(r.id);
    if (!(area > 0.0))
      invalid(op, "region " + std::to_string(r.id) +
                      " has non-positive signed area; check that normals point into the left region");
  }
}

const Region& CompositeMesh::region(int id) const {
  if (!has_region(id)) throw ValidationError("geometry", "region", "unknown region id " + std::to_string(id));
  return regions_[region_index_[id]];
}

bool CompositeMesh::has_region(int id) const {
  return id >= 0 && id < static_cast<int>(region_index_.size()) && region_index_[id] >= 0;
}

double CompositeMesh::edge_coefficient(int e) const {
  const auto& ed = edges_.at(e);
  return transmission_coefficient(region(ed.left_region), region(ed.right_region));
}

double CompositeMesh::region_area(int id) const {
  double area = 0.0;
  for (const auto& e : edges_) {
    const double c = cross(vertices_[e.v_start], vertices_[e.v_end]) / 2.0;
    if (e.left_region == id) area -= c;
    if (e.right_region == id) area += c;
  }
  return area;
}

bool CompositeMesh::point_in_region(const Vec2& x, int id) const {
  if (id == 0) return locate(x) == 0;
  bool inside = false;
  for (const auto& e : edges_) {
    if (e.left_region != id && e.right_region != id) continue;
    const Vec2& a = vertices_[e.v_start];
    const Vec2& b = vertices_[e.v_end];
    if ((a.y() > x.y()) != (b.y() > x.y())) {
      const double xc = a.x() + (x.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x.x() < xc) inside = !inside;
    }
  }
  return inside;
}

int CompositeMesh::locate(const Vec2& x) const {
  for (const auto& r : regions_)
    if (r.id != 0 && point_in_region(x, r.id)) return r.id;
  return 0;
}

std::array<double, 4> CompositeMesh::bounding_box() const {
  std::array<double, 4> bb{vertices_[0].x(), vertices_[0].y(), vertices_[0].x(), vertices_[0].y()};
  for (const auto& v : vertices_) {
    bb[0] = std::min(bb[0], v.x());
    bb[1] = std::min(bb[1], v.y());
    bb[2] = std::max(bb[2], v.x());
    bb[3] = std::max(bb[3], v.y());
  }
  return bb;
}

bool CompositeMesh::has_crossings() const {
  for (std::size_t i = 0; i < edges_.size(); ++i)
    for (std::size_t j = i + 1; j < edges_.size(); ++j) {
      const auto& e = edges_[i];
      const auto& f = edges_[j];
      const Vec2 &p1 = vertices_[e.v_start], &p2 = vertices_[e.v_end];
      const Vec2 &q1 = vertices_[f.v_start], &q2 = vertices_[f.v_end];
      const bool share = e.v_start == f.v_start || e.v_start == f.v_end || e.v_end == f.v_start ||
                         e.v_end == f.v_end;
      const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
      const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
      if (share) {
        // Adjacent edges only conflict when they fold back onto each other.
        if (o1 == 0 && o2 == 0) {
          const Vec2 de = p2 - p1, df = q2 - q1;
          const bool same_start = e.v_start == f.v_start || e.v_end == f.v_end;
          if ((same_start && de.dot(df) > 0) || (!same_start && de.dot(df) < 0)) return true;
        }
        continue;
      }
      if (o1 != o2 && o3 != o4) return true;
      if (o1 == 0 && on_segment(p1, p2, q1)) return true;
      if (o2 == 0 && on_segment(p1, p2, q2)) return true;
      if (o3 == 0 && on_segment(q1, q2, p1)) return true;
      if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    }
  return false;
}

CompositeMesh CompositeMesh::with_materials(const std::vector<Region>& regions) const {
  return CompositeMesh(vertices_, regions, edges_);
}

std::vector<Junction> detect_junctions(const CompositeMesh& mesh) { return mesh.junctions(); }

CompositeMesh load_geometry(const std::string& text) {
  const std::string op = "load_geometry";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("geometry", op, std::string("malformed JSON: ") + ex.what());
  }
  try {
    if (!j.is_object()) throw ParseError("geometry", op, "top level must be an object");
    for (const char* key : {"vertices", "regions", "edges"})
      if (!j.contains(key) || !j[key].is_array())
        throw ParseError("geometry", op, std::string("missing array \"") + key + "\"");
    std::vector<Vec2> verts;
    for (const auto& v : j["vertices"]) {
      if (!v.is_array() || v.size() != 2) throw ParseError("geometry", op, "vertex must be [x, y]");
      verts.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    std::vector<Region> regions;
    for (const auto& r : j["regions"]) {
      Region reg;
      reg.id = r.at("id").get<int>();
      reg.mu = r.at("mu").get<double>();
      reg.nu = r.at("nu").get<double>();
      regions.push_back(reg);
    }
    std::vector<EdgeSpec> edges;
    for (const auto& e : j["edges"]) {
      EdgeSpec ed;
      ed.v_start = e.at("v_start").get<int>();
      ed.v_end = e.at("v_end").get<int>();
      ed.left_region = e.at("left").get<int>();
      ed.right_region = e.at("right").get<int>();
      ed.panels_per_edge = e.contains("panels") ? e["panels"].get<int>() : 3;
      edges.push_back(ed);
    }
    return CompositeMesh(std::move(verts), std::move(regions), std::move(edges));
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("geometry", op, std::string("bad field: ") + ex.what());
  }
}

CompositeMesh load_geometry_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("geometry", "load_geometry", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_geometry(ss.str());
}

std::string dump_geometry(const CompositeMesh& mesh) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : mesh.vertices()) j["vertices"].push_back({v.x(), v.y()});
  j["regions"] = nlohmann::json::array();
  for (const auto& r : mesh.regions()) j["regions"].push_back({{"id", r.id}, {"mu", r.mu}, {"nu", r.nu}});
  j["edges"] = nlohmann::json::array();
  for (const auto& e : mesh.edges())
    j["edges"].push_back({{"v_start", e.v_start},
                          {"v_end", e.v_end},
                          {"left", e.left_region},
                          {"right", e.right_region},
                          {"panels", e.panels_per_edge}});
  return j.dump(2);
}

}  // namespace trijunc
