#pragma once

#include "trijunc/discretize.hpp"
#include "trijunc/errors.hpp"

#include <Eigen/Dense>

#include <string>

namespace trijunc {

enum class SolveMethod { LU, GMRES };

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;  // |M x - b| / |b|, recomputed from the returned x
  SolveMethod method = SolveMethod::GMRES;
  double elapsed = 0.0;   // seconds
};

struct SolveResult {
  Eigen::VectorXd x;
  SolveReport report;
};

// Thrown when GMRES stalls; carries the best iterate found.
class StagnationError : public ConvergenceError {
 public:
  StagnationError(const std::string& op, const std::string& message, SolveResult best)
      : ConvergenceError("solve", op, message), best_(std::move(best)) {}
  const SolveResult& best() const { return best_; }

 private:
  SolveResult best_;
};

// Unrestarted GMRES with modified Gram-Schmidt and one reorthogonalisation pass.
SolveResult gmres(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol, int max_iter = -1);
SolveResult lu_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

SolveResult solve_dirichlet(const NystromSystem& sys, const Eigen::VectorXd& rhs,
                            SolveMethod method = SolveMethod::GMRES, double tol = 5e-15);
// Solves the adjoint-structured system -rho/2 + diag(d) D^T rho = rhs. The result is a
// weak solution: accurate for smooth functionals such as moments and far-field values.
SolveResult solve_neumann_transpose(const NystromSystem& sys, const Eigen::VectorXd& rhs,
                                    SolveMethod method = SolveMethod::GMRES, double tol = 5e-15);

double condition_number(const Eigen::MatrixXd& M);
double condition_number(const NystromSystem& sys);

std::string to_string(SolveMethod m);
SolveMethod parse_method(const std::string& s);

}  // namespace trijunc
