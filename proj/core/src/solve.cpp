#include "trijunc/solve.hpp"

#include <chrono>
#include <cmath>
#include <vector>

namespace trijunc {

namespace {

constexpr int kMaxSvdSize = 20000;

double relative_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double bn = b.norm();
  const double rn = (A * x - b).norm();
  return bn > 0.0 ? rn / bn : rn;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SolveResult gmres(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol, int max_iter) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(b.size());
  if (A.rows() != n || A.cols() != n) throw SizeError("solve", "gmres", "matrix and right-hand side sizes differ");
  if (!(tol > 0.0)) throw DomainError("solve", "gmres", "tolerance must be positive");
  if (max_iter < 0) max_iter = n;

  SolveResult res;
  res.report.method = SolveMethod::GMRES;
  res.x = Eigen::VectorXd::Zero(n);
  const double beta = b.norm();
  if (beta == 0.0) {
    res.report.elapsed = seconds_since(t0);
    return res;
  }

  Eigen::MatrixXd Q(n, max_iter + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(max_iter + 1, max_iter);
  std::vector<double> cs(max_iter), sn(max_iter);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(max_iter + 1);
  Q.col(0) = b / beta;
  g[0] = beta;

  auto solution = [&](int k) {
    const Eigen::VectorXd y =
        H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    return Eigen::VectorXd(Q.leftCols(k) * y);
  };

  int k = 0;
  bool breakdown = false;
  while (k < max_iter) {
    Eigen::VectorXd w = A * Q.col(k);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= k; ++i) {
        const double h = Q.col(i).dot(w);
        H(i, k) += h;
        w -= h * Q.col(i);
      }
    const double hn = w.norm();
    H(k + 1, k) = hn;
    for (int i = 0; i < k; ++i) {
      const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
      H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
      H(i, k) = t;
    }
    const double r = std::hypot(H(k, k), H(k + 1, k));
    cs[k] = H(k, k) / r;
    sn[k] = H(k + 1, k) / r;
    H(k, k) = r;
    H(k + 1, k) = 0.0;
    g[k + 1] = -sn[k] * g[k];
    g[k] = cs[k] * g[k];
    ++k;
    breakdown = hn <= 1e-300;
    if (!breakdown) Q.col(k) = w / hn;
    if (std::abs(g[k]) <= tol * beta || breakdown) {
      res.x = solution(k);
      res.report.residual = relative_residual(A, res.x, b);
      res.report.iterations = k;
      if (res.report.residual <= tol || breakdown) break;
    }
  }
  if (res.report.iterations != k) {
    res.x = solution(k);
    res.report.residual = relative_residual(A, res.x, b);
    res.report.iterations = k;
  }
  res.report.elapsed = seconds_since(t0);
  if (!(res.report.residual <= tol))
    throw StagnationError("gmres",
                          "no convergence after " + std::to_string(k) + " iterations; relative residual " +
                              std::to_string(res.report.residual),
                          res);
  return res;
}

SolveResult lu_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const auto t0 = std::chrono::steady_clock::now();
  if (A.rows() != b.size() || A.cols() != b.size())
    throw SizeError("solve", "lu_solve", "matrix and right-hand side sizes differ");
  SolveResult res;
  res.report.method = SolveMethod::LU;
  res.x = A.partialPivLu().solve(b);
  res.report.residual = relative_residual(A, res.x, b);
  res.report.iterations = 0;
  res.report.elapsed = seconds_since(t0);
  if (!res.x.allFinite()) throw DegenerateError("solve", "lu_solve", "matrix is singular");
  return res;
}

namespace {

SolveResult dispatch(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs, SolveMethod method, double tol) {
  if (rhs.size() != M.rows()) throw SizeError("solve", "solve", "right-hand side does not match the system size");
  return method == SolveMethod::LU ? lu_solve(M, rhs) : gmres(M, rhs, tol);
}

}  // namespace

SolveResult solve_dirichlet(const NystromSystem& sys, const Eigen::VectorXd& rhs, SolveMethod method, double tol) {
  return dispatch(sys.dirichlet_matrix(), rhs, method, tol);
}

SolveResult solve_neumann_transpose(const NystromSystem& sys, const Eigen::VectorXd& rhs, SolveMethod method,
                                    double tol) {
  return dispatch(sys.neumann_matrix(), rhs, method, tol);
}

double condition_number(const Eigen::MatrixXd& M) {
  if (M.rows() > kMaxSvdSize)
    throw SizeError("solve", "condition_number",
                    "matrix too large for a dense SVD; sweep at a coarser discretization");
  if (M.size() == 0) throw SizeError("solve", "condition_number", "empty matrix");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  return smin > 0.0 ? s[0] / smin : INFINITY;
}

double condition_number(const NystromSystem& sys) { return condition_number(sys.dirichlet_matrix()); }

std::string to_string(SolveMethod m) { return m == SolveMethod::LU ? "lu" : "gmres"; }

SolveMethod parse_method(const std::string& s) {
  if (s == "lu") return SolveMethod::LU;
  if (s == "gmres") return SolveMethod::GMRES;
  throw ParseError("solve", "parse_method", "unknown method '" + s + "' (expected lu or gmres)");
}

}  // namespace trijunc
