#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace trijunc {

// Angles (theta1, theta2, theta3) summing to 2 pi and materials a = d31, b = d12.
struct JunctionParams {
  std::array<double, 3> angles{};
  double a = 0.0;
  double b = 0.0;

  double c() const { return -(a + b) / (1.0 + a * b); }
  // theta3 is derived so the triple sums to 2 pi exactly.
  static JunctionParams make(double theta1, double theta2, double a, double b);
  void validate() const;
};

double alpha(const JunctionParams& p, double beta);
double alpha_prime(const JunctionParams& p, double beta);
double alpha_second(const JunctionParams& p, double beta);

Eigen::Matrix3d build_Adir(const JunctionParams& p, double beta);
Eigen::Matrix3d build_Aneu(const JunctionParams& p, double beta);

struct ExponentBranch {
  int i = 0;
  int j = 0;
  double beta = 0.0;
  Eigen::Vector3d v = Eigen::Vector3d::Zero();  // density order (12, 23, 31)
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  double res_dir = 0.0;
  double res_neu = 0.0;
  bool degenerate = false;
  bool neumann_admissible = false;  // beta > 1/2
  bool converged = true;
  std::string note;
};

// Null vectors, residuals and degeneracy flag for a root beta of det A_dir.
void finalize_branch(const JunctionParams& p, ExponentBranch& br);

ExponentBranch integer_branch(const JunctionParams& p, int m);

enum class Axis { A0, B0, C0 };  // a = 0, b = 0, c = 0

// Axis on which p lies (within 1e-15), or throws DomainError if none or several.
Axis axis_of(const JunctionParams& p);

// Root of sin(pi z) = sign * delta * sin(z (pi - theta)) with z -> i as delta -> 0.
double axis_root(double delta, double theta, int i, int sign);

// Branch (i, sign) at parameters lying on exactly one axis.
ExponentBranch axis_branch(const JunctionParams& p, int i, int sign);

struct ContinuationOptions {
  int steps = 64;
  double newton_tol = 1e-14;
  int max_newton = 50;
  int max_halvings = 12;
};

// Tracks seed (a root of alpha at seed_params) along the straight segment to target.
ExponentBranch continue_branch(const JunctionParams& target, const ExponentBranch& seed,
                               const JunctionParams& seed_params, const ContinuationOptions& opt = {});

// Nearest point on the axes a = 0, b = 0, c = 0 (Euclidean in (a, b)).
JunctionParams nearest_axis_point(const JunctionParams& p);

// Continued branches beta_{i,1} (below i on the seed axis) and beta_{i,2} (above).
std::array<ExponentBranch, 2> family_branches(const JunctionParams& p, int i, const ContinuationOptions& opt = {});

// All 3(N+1) branches, sorted by beta. Failed continuations are kept with converged = false.
std::vector<ExponentBranch> find_branches(const JunctionParams& p, int N, const ContinuationOptions& opt = {});

struct ScanRow {
  double a = 0.0;
  double b = 0.0;
  int i = 0;
  int j = 0;
  double beta = 0.0;
  double res_dir = 0.0;
  double res_neu = 0.0;
  bool degenerate = false;
};

// Cell-centred grid over (-1, 1)^2; rows per point for every branch up to family N.
std::vector<ScanRow> degeneracy_scan(double theta1, double theta2, int grid, int N);

}  // namespace trijunc
