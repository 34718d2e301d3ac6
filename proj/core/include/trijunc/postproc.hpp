#pragma once

#include "trijunc/discretize.hpp"
#include "trijunc/solve.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace trijunc {

// Densities on a discretized boundary together with what is needed to evaluate
// u_R = -(1/mu_R) sum S[rho] - (1/nu_R) sum D[sigma] off the boundary.
struct FieldSolution {
  CompositeMesh mesh;
  std::vector<Panel> panels;
  Eigen::Matrix2Xd nodes;
  Eigen::Matrix2Xd normals;
  Eigen::VectorXd sqrt_w;
  Eigen::VectorXd sigma;  // sqrt(w)-scaled samples
  Eigen::VectorXd rho;    // sqrt(w)-scaled samples (weak solution)

  FieldSolution() = default;
  FieldSolution(const CompositeMesh& mesh, const NystromSystem& sys, Eigen::VectorXd sigma, Eigen::VectorXd rho);
};

// Throws DomainError when the target is not in the region or lies within the
// near-boundary band: Bernstein ellipse parameter below 3 for a smooth panel or
// below 3.5 for a corner panel.
double eval_field(const FieldSolution& sol, const Vec2& target, int region);
bool is_far_from_boundary(const FieldSolution& sol, const Vec2& target);

struct ManufacturedOptions {
  DiscretizationOptions disc;
  SolveMethod method = SolveMethod::GMRES;
  double tol = 5e-15;
  int grid = 50;
  int sources_per_region = 10;
};

struct ErrorSample {
  double x = 0.0;
  double y = 0.0;
  int region = 0;
  double abs_err = 0.0;
};

struct ManufacturedReport {
  double max_err = 0.0;
  std::map<int, double> region_max_err;
  int targets = 0;
  int dofs = 0;
  SolveReport dirichlet;
  SolveReport neumann;
  std::vector<ErrorSample> samples;
  std::string rule_hash;
};

// Source points c_(j,k): evenly spaced on a circle of radius twice the region diameter.
std::vector<Vec2> manufactured_sources(const CompositeMesh& mesh, int region, int count);
// u_j(x) = sum_k log |x - c_(j,k)| in interior regions, 0 in the exterior region.
double manufactured_u(const std::vector<Vec2>& sources, const Vec2& x);

ManufacturedReport manufactured_test(const CompositeMesh& mesh, const CornerRule& rule,
                                     const ManufacturedOptions& opt = {});

struct PolarizationResult {
  Eigen::Matrix2d P = Eigen::Matrix2d::Zero();
  std::array<SolveReport, 2> reports{};
  std::array<double, 2> total_charge{};  // integral of rho_d, a neutrality check
  int dofs = 0;
  std::string rule_hash;
};

// Materials come from the mesh: mu is forced to 1 and nu is read as the permittivity.
PolarizationResult polarization(const CompositeMesh& mesh, const CornerRule& rule, const DiscretizationOptions& disc = {},
                                SolveMethod method = SolveMethod::GMRES, double tol = 5e-15);

// Geometry with every vertex reflected through the y axis (orientation repaired).
CompositeMesh mirror_x(const CompositeMesh& mesh);
CompositeMesh translate(const CompositeMesh& mesh, const Vec2& shift);

// Three-sector junction templates. Regions 1, 2, 3 subtend theta1, theta2, theta3
// at the central vertex; region 0 is the exterior. The sector of theta3 is bisected by
// the negative y axis, so mirror_x of template(t1, t2) equals template(t2, t1).
CompositeMesh junction_disc_template(double theta1, double theta2, const std::array<Region, 4>& regions,
                                     int panels_per_edge = 3);
CompositeMesh junction_square_template(double theta1, double theta2, const std::array<Region, 4>& regions,
                                       int panels_per_edge = 3);

struct AbRow {
  double a = 0.0;
  double b = 0.0;
  double cond = 0.0;
};

struct AbSweepOptions {
  std::array<double, 3> mu{0.37, 0.81, 1.0};
  double nu3 = 0.77;
  Region exterior{0, 1.0, 1.0};
  int grid = 21;
  DiscretizationOptions disc;
};

// a = d31, b = d23; nu1 = nu3 mu1/mu3 (1+a)/(1-a), nu2 = nu3 mu2/mu3 (1-b)/(1+b).
std::array<Region, 4> ab_materials(double a, double b, const AbSweepOptions& opt);
std::vector<AbRow> sweep_ab(const CompositeMesh& templ, const CornerRule& rule, const AbSweepOptions& opt = {});

struct AngleRow {
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::string region;  // "I" (disc template) or "IV" (square template); "guard" if skipped
  double cond = 0.0;   // NaN for skipped points
};

struct AngleSweepOptions {
  int grid = 21;
  std::array<Region, 4> regions{Region{0, 1.0, 1.0}, Region{1, 0.37, 0.5}, Region{2, 0.81, 1.3},
                                Region{3, 1.0, 0.77}};
  DiscretizationOptions disc;
};

// Template label for a point: "IV" when theta3 is reflex, "I" otherwise.
std::string angle_region(double theta1, double theta2);
CompositeMesh angle_template(double theta1, double theta2, const std::array<Region, 4>& regions, int panels_per_edge);
std::vector<AngleRow> sweep_angles(const CornerRule& rule, const AngleSweepOptions& opt = {});

struct LatticeOptions {
  int cells_across = 3;          // odd; 3 -> 7 cells, 5 -> 19, 7 -> 37
  double perturbation = 0.1;     // fraction of the side length
  double eps_lo = -1.0;          // eps_i = 10^c_i with c_i uniform in [eps_lo, eps_hi]
  double eps_hi = 1.0;
  std::uint64_t seed = 1;
  int panels_per_edge = 3;
};

struct LatticeResult {
  CompositeMesh mesh;
  double perturbation_used = 0.0;
  int attempts = 0;
};

// Perturbed hexagonal patch inside the unit square; mu = 1 and nu = eps per cell.
LatticeResult lattice_generator(const LatticeOptions& opt = {});

}  // namespace trijunc
