#pragma once

#include "trijunc/exponents.hpp"

#include <Eigen/Dense>

#include <vector>

namespace trijunc {

// Material triple in the junction frame: (a, b, c) = (d31, d12, d23), plus the angles.
using JunctionFrame = JunctionParams;

// Coefficient of t^k / (beta - k) in K_dir[v t^beta] (zero diagonal).
Eigen::Matrix3d build_C(const JunctionFrame& p, int k);
// Coefficient of t^m in K_dir[v t^m] for integer beta = m (diagonal -1/2).
Eigen::Matrix3d build_Cdiag(const JunctionFrame& p, int m);
// Neumann analogue of build_Cdiag: coefficient of t^(m-1) in K_neu[w t^(m-1)].
Eigen::Matrix3d build_Cdiag_neu(const JunctionFrame& p, int m);

enum class DensityKind { Dirichlet, Neumann };

struct BranchPotential {
  // values(e, q): potential on edge e in (12, 23, 31) at t = ts[q]
  Eigen::MatrixXd values;
  Eigen::MatrixXd smooth;       // same, without the singular t^beta / log term
  Eigen::Vector3d singular;     // coefficient vector of the singular term
  double singular_norm = 0.0;   // its norm, the smoothness diagnostic
};

// Series evaluation of K_dir[v t^beta] (or K_neu[w t^(beta-1)]) on the three unit edges.
BranchPotential potential_of_power_density(const JunctionFrame& p, double beta, const Eigen::Vector3d& vec,
                                           const std::vector<double>& ts, int K,
                                           DensityKind kind = DensityKind::Dirichlet);
BranchPotential potential_of_power_density(const JunctionFrame& p, const ExponentBranch& br,
                                           const std::vector<double>& ts, int K,
                                           DensityKind kind = DensityKind::Dirichlet);

// Taylor coefficient (k-th power for Dirichlet, (k-1)-th for Neumann) contributed by a branch.
Eigen::Vector3d taylor_column(const JunctionFrame& p, double beta, const Eigen::Vector3d& vec, int k,
                              DensityKind kind);

struct CompletenessMatrix {
  int N = 0;
  DensityKind kind = DensityKind::Dirichlet;
  Eigen::MatrixXd B;                       // 3(N+1) x 3(N+1); rows (k, edge), cols (i, j)
  std::vector<ExponentBranch> branches;    // ordered by (i, j); Neumann uses families 1..N+1
  double condition = 0.0;
  int family_offset = 0;                   // 0 for Dirichlet, 1 for Neumann

  Eigen::Matrix3d block(int k, int i) const { return B.block<3, 3>(3 * k, 3 * i); }
};

CompletenessMatrix build_completeness(const JunctionFrame& p, int N, DensityKind kind = DensityKind::Dirichlet,
                                      const ContinuationOptions& opt = {});

// Monomial data h_e(t) = sum_k coeffs(e, k) t^k on edges (12, 23, 31).
struct PolynomialData {
  int N = 0;
  Eigen::MatrixXd coeffs;  // 3 x (N+1)
};

struct CornerCoefficients {
  Eigen::VectorXd p;       // ordered like CompletenessMatrix::branches
  double residual = 0.0;   // |B p - h| / |h|
};

CornerCoefficients solve_corner_coeffs(const CompletenessMatrix& B, const PolynomialData& data);

// h(t) - K[sigma](t) for the reconstructed density, evaluated from the series tail so that
// the result is free of cancellation at small t. Rows are edges, columns follow ts.
Eigen::MatrixXd corner_residual(const JunctionFrame& p, const CompletenessMatrix& B, const CornerCoefficients& c,
                                const PolynomialData& data, const std::vector<double>& ts, int K);

}  // namespace trijunc
