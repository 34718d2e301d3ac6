#pragma once

#include "trijunc/corner_rule.hpp"
#include "trijunc/geometry.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace trijunc {

enum class PanelKind { Smooth, Corner };

struct Panel {
  int edge = 0;
  double s0 = 0.0;  // arclength interval along the edge, measured from v_start
  double s1 = 0.0;
  PanelKind kind = PanelKind::Smooth;
  int vertex = -1;  // adjacent vertex for corner panels
  Vec2 origin = Vec2::Zero();     // t = 0 end (the vertex for corner panels)
  Vec2 direction = Vec2::Zero();  // unit vector from origin into the panel
  double length = 0.0;
  int offset = 0;  // index of the first node in the global numbering
  std::vector<Vec2> nodes;
  std::vector<double> weights;    // arclength weights

  int size() const { return static_cast<int>(nodes.size()); }
  Vec2 point(double t) const { return origin + (t * length) * direction; }
};

struct DiscretizationOptions {
  int panels_per_edge = 0;  // 0: use the count stored on each edge
  int smooth_order = 16;
  double min_angle = 3.14159265358979323846 / 12.0;
};

std::vector<Panel> build_panels(const CompositeMesh& mesh, const CornerRule& rule,
                                const DiscretizationOptions& opt = {});

// Weighted Nystrom discretization of the transmission double-layer operator.
// Unknowns are sqrt(w)-scaled samples. The Dirichlet-type matrix is
// M = -I/2 + diag(d) D; the Neumann-type matrix is -I/2 + diag(d) D^T.
struct NystromSystem {
  std::vector<Panel> panels;
  Eigen::MatrixXd D;          // scaled double-layer coupling (no material factor)
  Eigen::VectorXd d;          // transmission coefficient of each node's edge
  Eigen::VectorXd sqrt_w;
  Eigen::Matrix2Xd nodes;
  Eigen::Matrix2Xd normals;
  std::vector<int> node_edge;
  std::string rule_hash;

  int size() const { return static_cast<int>(d.size()); }
  Eigen::MatrixXd dirichlet_matrix() const;
  Eigen::MatrixXd neumann_matrix() const;
};

NystromSystem assemble_Kdir(const CompositeMesh& mesh, const CornerRule& rule, const DiscretizationOptions& opt = {});

// Same geometry and panels with new materials: only d changes.
NystromSystem with_materials(const NystromSystem& sys, const CompositeMesh& mesh);

using EdgeFunction = std::function<double(int edge, const Vec2& x)>;

// sqrt(w) * nu_l nu_r f / (mu_r nu_l + mu_l nu_r)
Eigen::VectorXd build_rhs_dirichlet(const CompositeMesh& mesh, const NystromSystem& sys, const EdgeFunction& f);
// sqrt(w) * (-mu_l mu_r g) / (mu_r nu_l + mu_l nu_r)
Eigen::VectorXd build_rhs_neumann(const CompositeMesh& mesh, const NystromSystem& sys, const EdgeFunction& g);

// Binary dump: int64 n, then n (x, y) pairs, then the n x n Dirichlet matrix row-major.
void dump_matrix(const NystromSystem& sys, const std::string& path);

}  // namespace trijunc
