#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace trijunc {

using Vec2 = Eigen::Vector2d;

struct Region {
  int id = 0;
  double mu = 1.0;
  double nu = 1.0;
};

// Oriented straight edge. The normal is perp(v_end - v_start) with
// perp(x1, x2) = (x2, -x1), and it points into the `left` region.
struct EdgeSpec {
  int id = 0;
  int v_start = 0;
  int v_end = 0;
  int left_region = 0;
  int right_region = 0;
  double length = 0.0;
  Vec2 normal = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();
  int panels_per_edge = 3;
};

// Transmission coefficient of an edge: (mu_r nu_l - mu_l nu_r) / (mu_r nu_l + mu_l nu_r).
double transmission_coefficient(const Region& left, const Region& right);

// d_(i,j) for the ordered pair of sectors (i, j).
double sector_coefficient(const Region& ri, const Region& rj);

// Triple junction in its local frame. edges = (G31, G12, G23), listed
// counterclockwise by outgoing direction; region k lies between G_(k-1,k)
// and G_(k,k+1) and subtends angle theta_k.
struct Junction {
  int vertex = 0;
  std::array<int, 3> edges{};
  std::array<double, 3> angles{};
  std::array<int, 3> regions{};
  std::array<double, 3> materials{};  // (a, b, c) = (d31, d12, d23)
};

// Any vertex with two or three incident edges; panels next to it are corner panels.
struct Corner {
  int vertex = 0;
  std::vector<int> edges;            // counterclockwise by outgoing direction
  std::vector<double> angles;        // angle from edges[k] to edges[k+1]
};

class CompositeMesh {
 public:
  CompositeMesh() = default;
  // Validates and derives normals, lengths, corners and junctions.
  CompositeMesh(std::vector<Vec2> vertices, std::vector<Region> regions, std::vector<EdgeSpec> edges);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<EdgeSpec>& edges() const { return edges_; }
  const std::vector<Region>& regions() const { return regions_; }
  const std::vector<Junction>& junctions() const { return junctions_; }
  const std::vector<Corner>& corners() const { return corners_; }

  const Region& region(int id) const;
  bool has_region(int id) const;
  // Edges incident to a vertex.
  const std::vector<int>& incident(int vertex) const { return incident_[vertex]; }
  // Transmission coefficient d of edge e.
  double edge_coefficient(int e) const;
  // Signed area of region id (positive for a consistently oriented interior region).
  double region_area(int id) const;
  // Crossing-parity test using the edges that bound region id.
  bool point_in_region(const Vec2& x, int id) const;
  // Region containing x (0 if none of the interior regions does).
  int locate(const Vec2& x) const;
  // Bounding box of the vertices: (xmin, ymin, xmax, ymax).
  std::array<double, 4> bounding_box() const;
  // True if any two non-adjacent edges intersect, or adjacent ones overlap.
  bool has_crossings() const;

  // Same geometry with new material constants per region id.
  CompositeMesh with_materials(const std::vector<Region>& regions) const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<Region> regions_;
  std::vector<EdgeSpec> edges_;
  std::vector<Junction> junctions_;
  std::vector<Corner> corners_;
  std::vector<std::vector<int>> incident_;
  std::vector<int> region_index_;  // id -> position in regions_, -1 if absent
};

// Parses the JSON geometry format and validates it.
CompositeMesh load_geometry(const std::string& text);
CompositeMesh load_geometry_file(const std::string& path);
std::string dump_geometry(const CompositeMesh& mesh);

// Junctions of a validated mesh (also available as mesh.junctions()).
std::vector<Junction> detect_junctions(const CompositeMesh& mesh);

}  // namespace trijunc
