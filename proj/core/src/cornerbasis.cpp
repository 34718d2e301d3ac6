#include "trijunc/cornerbasis.hpp"

#include "trijunc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

namespace trijunc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kIntTol = 1e-9;

bool near_int(double beta, int k) { return std::abs(beta - k) <= kIntTol; }

int nearest_int(double beta) { return static_cast<int>(std::lround(beta)); }

// Singular part of the series: coefficient vector and whether it multiplies a log.
struct Singular {
  Eigen::Vector3d coef = Eigen::Vector3d::Zero();
  bool log_term = false;
  double power = 0.0;  // exponent of t in the singular term
};

Singular singular_part(const JunctionFrame& p, double beta, const Eigen::Vector3d& vec, DensityKind kind) {
  Singular s;
  const bool neu = kind == DensityKind::Neumann;
  const int m = nearest_int(beta);
  if (near_int(beta, m)) {
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    const Eigen::Matrix3d A = neu ? build_Aneu(p, m) : build_Adir(p, m);
    s.coef = -(sign / (2.0 * kPi)) * (A * vec);
    s.log_term = true;
    s.power = neu ? m - 1 : m;
  } else {
    const Eigen::Matrix3d A = neu ? build_Aneu(p, beta) : build_Adir(p, beta);
    s.coef = -(A * vec) / (2.0 * std::sin(kPi * beta));
    s.power = neu ? beta - 1.0 : beta;
  }
  return s;
}

double singular_factor(const Singular& s, double t) {
  const double tp = std::pow(t, s.power);
  return s.log_term ? tp * std::log(t) : tp;
}

}  // namespace

Eigen::Matrix3d build_C(const JunctionFrame& p, int k) {
  const double s1 = std::sin(k * p.angles[0]);
  const double s2 = std::sin(k * p.angles[1]);
  const double s3 = std::sin(k * p.angles[2]);
  const double a = p.a, b = p.b, c = p.c();
  Eigen::Matrix3d C;
  C << 0.0, -b * s2, b * s1,
       c * s2, 0.0, -c * s3,
       -a * s1, a * s3, 0.0;
  return C / (2.0 * kPi);
}

Eigen::Matrix3d build_Cdiag(const JunctionFrame& p, int m) {
  const auto& th = p.angles;
  const double g1 = (kPi - th[0]) * std::cos(m * th[0]);
  const double g2 = (kPi - th[1]) * std::cos(m * th[1]);
  const double g3 = (kPi - th[2]) * std::cos(m * th[2]);
  const double a = p.a, b = p.b, c = p.c();
  Eigen::Matrix3d C;
  C << kPi, b * g2, -b * g1,
       -c * g2, kPi, c * g3,
       a * g1, -a * g3, kPi;
  return -C / (2.0 * kPi);
}

Eigen::Matrix3d build_Cdiag_neu(const JunctionFrame& p, int m) {
  return -build_Cdiag(p, m) - Eigen::Matrix3d::Identity();
}

Eigen::Vector3d taylor_column(const JunctionFrame& p, double beta, const Eigen::Vector3d& vec, int k,
                              DensityKind kind) {
  if (kind == DensityKind::Dirichlet) {
    if (near_int(beta, k)) return build_Cdiag(p, k) * vec;
    return build_C(p, k) * vec / (beta - k);
  }
  if (near_int(beta, k)) return build_Cdiag_neu(p, k) * vec;
  return -build_C(p, k) * vec / (beta - k);
}

BranchPotential potential_of_power_density(const JunctionFrame& p, double beta, const Eigen::Vector3d& vec,
                                           const std::vector<double>& ts, int K, DensityKind kind) {
  if (kind == DensityKind::Neumann && !(beta > 0.5))
    throw DomainError("cornerbasis", "potential_of_power_density", "Neumann densities need beta > 1/2");
  if (K < 0) throw DomainError("cornerbasis", "potential_of_power_density", "truncation must be nonnegative");
  for (double t : ts)
    if (!(t > 0.0 && t < 1.0))
      throw DomainError("cornerbasis", "potential_of_power_density", "evaluation points must lie in (0, 1)");

  const Singular s = singular_part(p, beta, vec, kind);
  const int k0 = kind == DensityKind::Neumann ? 1 : 0;
  std::vector<Eigen::Vector3d> cols;
  for (int k = k0; k <= K; ++k) cols.push_back(taylor_column(p, beta, vec, k, kind));

  BranchPotential out;
  const int n = static_cast<int>(ts.size());
  out.values.resize(3, n);
  out.smooth.resize(3, n);
  out.singular = s.coef;
  out.singular_norm = s.coef.norm();
  for (int q = 0; q < n; ++q) {
    const double t = ts[q];
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    // Horner in t, highest power first.
    for (int k = K; k >= k0; --k) acc = acc * t + cols[k - k0];
    out.smooth.col(q) = acc;
    out.values.col(q) = acc + s.coef * singular_factor(s, t);
  }
  return out;
}

BranchPotential potential_of_power_density(const JunctionFrame& p, const ExponentBranch& br,
                                           const std::vector<double>& ts, int K, DensityKind kind) {
  return potential_of_power_density(p, br.beta, kind == DensityKind::Neumann ? br.w : br.v, ts, K, kind);
}

CompletenessMatrix build_completeness(const JunctionFrame& p, int N, DensityKind kind, const ContinuationOptions& opt) {
  const std::string op = "build_completeness";
  if (N < 0) throw DomainError("cornerbasis", op, "N must be nonnegative");
  CompletenessMatrix cm;
  cm.N = N;
  cm.kind = kind;
  cm.family_offset = kind == DensityKind::Neumann ? 1 : 0;

  std::vector<ExponentBranch> all = find_branches(p, N + cm.family_offset, opt);
  for (const auto& br : all)
    if (br.i >= cm.family_offset) cm.branches.push_back(br);
  std::sort(cm.branches.begin(), cm.branches.end(),
            [](const ExponentBranch& x, const ExponentBranch& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });

  for (const auto& br : cm.branches) {
    std::ostringstream os;
    os << "branch (" << br.i << ", " << br.j << ")";
    if (!br.converged || !std::isfinite(br.beta))
      throw DegenerateError("cornerbasis", op, os.str() + " could not be continued: " + br.note);
    if (kind == DensityKind::Neumann && !(br.beta > 0.5))
      throw DegenerateError("cornerbasis", op, os.str() + " has beta <= 1/2, outside the Neumann family");
  }

  const int n = 3 * (N + 1);
  cm.B.resize(n, n);
  for (int col = 0; col < n; ++col) {
    const auto& br = cm.branches[col];
    const Eigen::Vector3d& vec = kind == DensityKind::Neumann ? br.w : br.v;
    for (int row = 0; row <= N; ++row)
      cm.B.block<3, 1>(3 * row, col) = taylor_column(p, br.beta, vec, row + cm.family_offset, kind);
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(cm.B);
  const auto& sv = svd.singularValues();
  cm.condition = sv[n - 1] > 0.0 ? sv[0] / sv[n - 1] : INFINITY;
  if (!(cm.condition <= 1e12)) {
    // Name the branch that loads most on the weakest right singular vector.
    Eigen::BDCSVD<Eigen::MatrixXd> full(cm.B, Eigen::ComputeFullV);
    Eigen::Index worst = 0;
    full.matrixV().col(n - 1).cwiseAbs().maxCoeff(&worst);
    const auto& br = cm.branches[worst];
    std::ostringstream os;
    os << "completeness matrix is singular (condition " << cm.condition << "); weakest direction on branch ("
       << br.i << ", " << br.j << ") with beta = " << br.beta;
    throw DegenerateError("cornerbasis", op, os.str());
  }
  return cm;
}

CornerCoefficients solve_corner_coeffs(const CompletenessMatrix& B, const PolynomialData& data) {
  const int n = 3 * (B.N + 1);
  if (data.N != B.N || data.coeffs.rows() != 3 || data.coeffs.cols() != B.N + 1)
    throw SizeError("cornerbasis", "solve_corner_coeffs", "polynomial data does not match the matrix degree");
  if (!data.coeffs.allFinite()) throw DomainError("cornerbasis", "solve_corner_coeffs", "non-finite data");
  Eigen::VectorXd h(n);
  for (int k = 0; k <= B.N; ++k)
    for (int e = 0; e < 3; ++e) h[3 * k + e] = data.coeffs(e, k);
  CornerCoefficients c;
  c.p = B.B.fullPivLu().solve(h);
  const double hn = h.norm();
  c.residual = hn > 0.0 ? (B.B * c.p - h).norm() / hn : (B.B * c.p).norm();
  return c;
}

Eigen::MatrixXd corner_residual(const JunctionFrame& p, const CompletenessMatrix& B, const CornerCoefficients& c,
                                const PolynomialData& data, const std::vector<double>& ts, int K) {
  const int N = B.N;
  const int off = B.family_offset;
  const int n = static_cast<int>(ts.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(3, n);
  const Eigen::VectorXd Bp = B.B * c.p;

  // Low-order part: data minus the matched Taylor coefficients.
  for (int q = 0; q < n; ++q) {
    double tk = 1.0;
    for (int k = 0; k <= N; ++k, tk *= ts[q])
      for (int e = 0; e < 3; ++e) out(e, q) += (data.coeffs(e, k) - Bp[3 * k + e]) * tk;
  }
  // Tail of the series and the singular remainders.
  for (std::size_t col = 0; col < B.branches.size(); ++col) {
    const auto& br = B.branches[col];
    const Eigen::Vector3d& vec = B.kind == DensityKind::Neumann ? br.w : br.v;
    const Singular s = singular_part(p, br.beta, vec, B.kind);
    std::vector<Eigen::Vector3d> tail;
    for (int k = N + 1 + off; k <= K; ++k) tail.push_back(taylor_column(p, br.beta, vec, k, B.kind));
    for (int q = 0; q < n; ++q) {
      const double t = ts[q];
      Eigen::Vector3d acc = Eigen::Vector3d::Zero();
      for (int k = K; k >= N + 1 + off; --k) acc = acc * t + tail[k - (N + 1 + off)];
      acc *= std::pow(t, N + 1);
      acc += s.coef * singular_factor(s, t);
      out.col(q) -= c.p[col] * acc;
    }
  }
  return out;
}

}  // namespace trijunc
