#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace trijunc {

// Composite Gauss-Legendre grid on [0, 1], dyadically graded toward t = 0.
struct ReferenceGrid {
  int order = 30;
  std::vector<std::pair<double, double>> panels;
  Eigen::VectorXd t;
  Eigen::VectorXd w;

  int panel_of(double x) const;
  // Row vector mapping grid samples to the piecewise interpolant at x.
  void interp_row(double x, Eigen::Ref<Eigen::RowVectorXd> row) const;
};

const ReferenceGrid& reference_grid();

// Interpolatory rule for F = { t^beta : beta in {0} U [1/2, beta_max] } on [0, 1].
struct CornerRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::MatrixXd basis_at_nodes;  // phi_k(t_j), row j
  Eigen::MatrixXd V;               // sqrt(w)-scaled samples -> phi coefficients
  Eigen::MatrixXd grid_basis;      // phi_k on the reference grid
  int k = 0;
  double beta_max = 50.0;
  double tol = 1e-13;
  double condV = 0.0;

  // Grid values of the node cardinal functions: density on grid = G * density at nodes.
  Eigen::MatrixXd grid_interp() const;
  std::uint64_t hash() const;
};

struct RuleValidation {
  double sum_w_err = 0.0;
  double max_quad_err = 0.0;
  double max_interp_err = 0.0;
  double min_weight = 0.0;
  double condV = 0.0;
  int k = 0;
  bool ok = false;
};

CornerRule build_corner_rule(double beta_max = 50.0, double tol = 1e-13);
RuleValidation validate_corner_rule(const CornerRule& rule, int n_test = 500, double beta_max = 50.0);

std::string rule_to_json(const CornerRule& rule);
CornerRule rule_from_json(const std::string& text);
std::string hash_hex(std::uint64_t h);

// Loads the rule from path if it exists and matches, otherwise builds and writes it.
CornerRule load_or_build_rule(const std::string& path, double beta_max = 50.0, double tol = 1e-13,
                              bool* built = nullptr);

// Process-wide default rule. Honours TRIJUNC_RULE_CACHE as an on-disk cache path.
const CornerRule& default_corner_rule();

}  // namespace trijunc
