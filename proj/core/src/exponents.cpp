#include "trijunc/exponents.hpp"

#include "trijunc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace trijunc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNullTol = 1e-8;
constexpr double kIntegerTol = 1e-9;

double sq(double x) { return x * x; }

Eigen::Vector3d normalize_sign(Eigen::Vector3d v) {
  int k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v[k] < 0) v = -v;
  return v;
}

struct NullInfo {
  int nullity = 0;
  Eigen::Matrix3d V;       // right singular vectors, smallest singular value last
  Eigen::Vector3d sigma;
};

NullInfo null_space(const Eigen::Matrix3d& A) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(A, Eigen::ComputeFullV);
  NullInfo n;
  n.sigma = svd.singularValues();
  n.V = svd.matrixV();
  // Entries are sines, so the natural scale is 1; a roundoff-sized A counts as zero.
  const double scale = std::max(n.sigma[0], 1.0);
  for (int k = 0; k < 3; ++k)
    if (n.sigma[k] < kNullTol * scale) ++n.nullity;
  return n;
}

// Two unit vectors completing u to an orthonormal basis, chosen deterministically.
std::array<Eigen::Vector3d, 2> complete_basis(const Eigen::Vector3d& u) {
  int k = 0;
  u.cwiseAbs().minCoeff(&k);
  Eigen::Vector3d e = Eigen::Vector3d::Unit(k);
  Eigen::Vector3d x = (e - u.dot(e) * u).normalized();
  Eigen::Vector3d y = u.cross(x).normalized();
  return {normalize_sign(x), normalize_sign(y)};
}

int alpha_multiplicity(const JunctionParams& p, double beta) {
  if (std::abs(alpha(p, beta)) > 1e-8) return 0;
  if (std::abs(alpha_prime(p, beta)) > 1e-9) return 1;
  if (std::abs(alpha_second(p, beta)) > 1e-9) return 2;
  return 3;
}

JunctionParams lerp(const JunctionParams& a, const JunctionParams& b, double s) {
  JunctionParams r = b;
  r.a = a.a + s * (b.a - a.a);
  r.b = a.b + s * (b.b - a.b);
  return r;
}

std::string describe(const JunctionParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(a=" << p.a << ", b=" << p.b << ")";
  return os.str();
}

}  // namespace

JunctionParams JunctionParams::make(double theta1, double theta2, double a, double b) {
  JunctionParams p;
  p.angles = {theta1, theta2, kTwoPi - theta1 - theta2};
  p.a = a;
  p.b = b;
  p.validate();
  return p;
}

void JunctionParams::validate() const {
  for (double t : angles)
    if (!(t > 0.0 && t < kTwoPi)) throw DomainError("exponents", "validate", "angles must lie in (0, 2 pi)");
  if (std::abs(angles[0] + angles[1] + angles[2] - kTwoPi) > 1e-13)
    throw DomainError("exponents", "validate", "angles must sum to 2 pi");
  if (!(std::abs(a) < 1.0) || !(std::abs(b) < 1.0))
    throw DomainError("exponents", "validate", "a and b must lie in (-1, 1)");
}

double alpha(const JunctionParams& p, double beta) {
  const double c = p.c();
  const auto& th = p.angles;
  return sq(std::sin(kPi * beta)) + p.b * c * sq(std::sin(beta * (kPi - th[1]))) +
         p.a * c * sq(std::sin(beta * (kPi - th[2]))) + p.a * p.b * sq(std::sin(beta * (kPi - th[0])));
}

double alpha_prime(const JunctionParams& p, double beta) {
  const double c = p.c();
  const auto& th = p.angles;
  auto term = [&](double coef, double A) { return coef * A * std::sin(2.0 * beta * A); };
  return term(1.0, kPi) + term(p.b * c, kPi - th[1]) + term(p.a * c, kPi - th[2]) + term(p.a * p.b, kPi - th[0]);
}

double alpha_second(const JunctionParams& p, double beta) {
  const double c = p.c();
  const auto& th = p.angles;
  auto term = [&](double coef, double A) { return 2.0 * coef * A * A * std::cos(2.0 * beta * A); };
  return term(1.0, kPi) + term(p.b * c, kPi - th[1]) + term(p.a * c, kPi - th[2]) + term(p.a * p.b, kPi - th[0]);
}

Eigen::Matrix3d build_Adir(const JunctionParams& p, double beta) {
  const auto& th = p.angles;
  const double sp = std::sin(kPi * beta);
  const double s1 = std::sin(beta * (kPi - th[0]));
  const double s2 = std::sin(beta * (kPi - th[1]));
  const double s3 = std::sin(beta * (kPi - th[2]));
  const double e = (p.a + p.b) / (1.0 + p.a * p.b);
  Eigen::Matrix3d A;
  A << sp, p.b * s2, -p.b * s1,
       e * s2, sp, -e * s3,
       p.a * s1, -p.a * s3, sp;
  return A;
}

Eigen::Matrix3d build_Aneu(const JunctionParams& p, double beta) {
  Eigen::Matrix3d A = -build_Adir(p, beta);
  A.diagonal() = -A.diagonal();
  return A;
}

void finalize_branch(const JunctionParams& p, ExponentBranch& br) {
  const double beta = br.beta;
  br.neumann_admissible = beta > 0.5;
  if (br.i == 0) {
    br.v = Eigen::Vector3d::Unit(br.j);
    br.w = br.v;
    br.res_dir = (build_Adir(p, beta) * br.v).norm();
    br.res_neu = (build_Aneu(p, beta) * br.w).norm();
    br.degenerate = false;
    return;
  }
  const Eigen::Matrix3d Ad = build_Adir(p, beta);
  const Eigen::Matrix3d An = build_Aneu(p, beta);
  const NullInfo nd = null_space(Ad);
  const NullInfo nn = null_space(An);
  const bool is_int = std::abs(beta - std::round(beta)) <= kIntegerTol;
  const long m = std::lround(beta);

  Eigen::Vector3d formula = Eigen::Vector3d::Zero();
  if (is_int && m >= 1) {
    const auto& th = p.angles;
    formula << std::sin(m * th[2]), std::sin(m * th[0]), std::sin(m * th[1]);
  }
  const bool formula_ok = formula.norm() > 1e-8;

  auto pick = [&](const NullInfo& n, const Eigen::Matrix3d& A) -> Eigen::Vector3d {
    if (n.nullity <= 1) {
      if (br.j == 0 && formula_ok && (A * formula.normalized()).norm() <= 1e-10) return formula.normalized();
      return n.V.col(2);
    }
    if (formula_ok && (A * formula.normalized()).norm() <= 1e-10) {
      const Eigen::Vector3d u = normalize_sign(formula.normalized());
      if (br.j == 0) return u;
      return complete_basis(u)[br.j - 1];
    }
    return n.V.col(3 - n.nullity + std::min(br.j, n.nullity - 1));
  };
  br.v = normalize_sign(pick(nd, Ad));
  br.w = normalize_sign(pick(nn, An));
  br.res_dir = (Ad * br.v).norm();
  br.res_neu = (An * br.w).norm();
  const int mult = (is_int ? 1 : 0) + alpha_multiplicity(p, beta);
  br.degenerate = nd.nullity > 1 || nd.nullity != mult;
}

ExponentBranch integer_branch(const JunctionParams& p, int m) {
  if (m < 1) throw DomainError("exponents", "integer_branch", "m must be a positive integer");
  ExponentBranch br;
  br.i = m;
  br.j = 0;
  br.beta = m;
  finalize_branch(p, br);
  return br;
}

Axis axis_of(const JunctionParams& p) {
  const double tol = 1e-15;
  if (std::abs(p.a) <= tol) return Axis::A0;
  if (std::abs(p.b) <= tol) return Axis::B0;
  if (std::abs(p.c()) <= tol) return Axis::C0;
  throw DomainError("exponents", "axis_branch", "parameters " + describe(p) + " are not on an axis");
}

double axis_root(double delta, double theta, int i, int sign) {
  if (i < 1) throw DomainError("exponents", "axis_branch", "family index must be positive");
  if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("exponents", "axis_branch", "delta must lie in [0, 1)");
  const double A = kPi - theta;
  const double s = sign >= 0 ? 1.0 : -1.0;
  if (delta == 0.0) return i;
  const double lo = i - 0.5, hi = i + 0.5;
  auto h = [&](double z, double d) { return std::sin(kPi * z) - s * d * std::sin(z * A); };
  auto dh = [&](double z, double d) { return kPi * std::cos(kPi * z) - s * d * A * std::cos(z * A); };

  // Track the root from delta = 0, where it equals i; the bracket keeps its sign change.
  const int nsteps = std::max(8, static_cast<int>(std::ceil(delta / 0.02)));
  double z = i;
  for (int k = 1; k <= nsteps; ++k) {
    const double d = delta * k / nsteps;
    // Newton on the bracket of the current continuation point only.
    double a = std::max(lo, z - 0.25), b = std::min(hi, z + 0.25);
    if ((h(a, d) > 0) == (h(b, d) > 0)) {
      a = lo;
      b = hi;
    }
    double fa = h(a, d);
    for (int it = 0; it < 200; ++it) {
      const double f = h(z, d);
      if (f == 0.0) break;
      if ((f > 0) == (fa > 0)) {
        a = z;
        fa = f;
      } else {
        b = z;
      }
      double zn = z - f / dh(z, d);
      if (!(zn > a && zn < b)) zn = 0.5 * (a + b);
      const bool done = std::abs(zn - z) <= 1e-16 * std::max(1.0, std::abs(z));
      z = zn;
      if (done) break;
    }
  }
  return z;
}

ExponentBranch axis_branch(const JunctionParams& p, int i, int sign) {
  p.validate();
  const Axis ax = axis_of(p);
  double theta = 0.0, delta = 0.0;
  switch (ax) {
    case Axis::A0: theta = p.angles[1]; delta = std::abs(p.b); break;
    case Axis::B0: theta = p.angles[2]; delta = std::abs(p.a); break;
    case Axis::C0: theta = p.angles[0]; delta = std::abs(p.a); break;
  }
  ExponentBranch br;
  br.i = i;
  br.beta = axis_root(delta, theta, i, sign);
  if (br.beta < i) br.j = 1;
  else if (br.beta > i) br.j = 2;
  else br.j = sign >= 0 ? 2 : 1;
  const double resid = std::sin(kPi * br.beta) - (sign >= 0 ? 1.0 : -1.0) * delta * std::sin(br.beta * (kPi - theta));
  if (std::abs(resid) > 1e-12) {
    throw ConvergenceError("exponents", "axis_branch", "root refinement failed for family " + std::to_string(i));
  }
  finalize_branch(p, br);
  return br;
}

JunctionParams nearest_axis_point(const JunctionParams& p) {
  const double da = std::abs(p.a), db = std::abs(p.b), dc = std::abs(p.a + p.b) / std::sqrt(2.0);
  JunctionParams q = p;
  if (da <= db && da <= dc) {
    q.a = 0.0;
  } else if (db <= dc) {
    q.b = 0.0;
  } else {
    const double h = 0.5 * (p.a - p.b);
    q.a = h;
    q.b = -h;
  }
  return q;
}

ExponentBranch continue_branch(const JunctionParams& target, const ExponentBranch& seed,
                               const JunctionParams& seed_params, const ContinuationOptions& opt) {
  const std::string op = "continue_branch";
  target.validate();
  ExponentBranch out = seed;
  if (seed_params.a == target.a && seed_params.b == target.b) {
    finalize_branch(target, out);
    return out;
  }
  if (std::abs(alpha(seed_params, seed.beta)) > 1e-10)
    throw DomainError("exponents", op, "seed is not a root of alpha at the seed parameters");

  auto newton = [&](const JunctionParams& p, double beta, int& iters) -> std::pair<bool, double> {
    for (iters = 0; iters < opt.max_newton; ++iters) {
      const double f = alpha(p, beta);
      if (std::abs(f) <= opt.newton_tol) return {true, beta};
      const double d = alpha_prime(p, beta);
      if (!(std::abs(d) > 1e-13)) return {false, beta};
      const double step = f / d;
      beta -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(beta))) return {true, beta};
    }
    return {std::abs(alpha(p, beta)) <= 10 * opt.newton_tol, beta};
  };

  const double h0 = 1.0 / std::max(1, opt.steps);
  const double hmin = h0 / std::pow(2.0, opt.max_halvings);
  double s = 0.0, h = h0;
  double beta = seed.beta;
  double s_prev = -1.0, beta_prev = beta;
  bool have_prev = false;
  while (s < 1.0) {
    const double s_new = std::min(1.0, s + h);
    double pred = beta;
    if (have_prev) pred = beta + (beta - beta_prev) / (s - s_prev) * (s_new - s);
    const JunctionParams ps = lerp(seed_params, target, s_new);
    int iters = 0;
    auto [ok, bn] = newton(ps, pred, iters);
    const bool jump = std::abs(bn - pred) > 0.02 + 0.5 * std::abs(pred - beta);
    if (ok && !jump && iters <= 20) {
      s_prev = s;
      beta_prev = beta;
      have_prev = true;
      s = s_new;
      beta = bn;
      h = std::min(h0, 1.5 * h);
      continue;
    }
    h *= 0.5;
    if (h < hmin) {
      std::ostringstream os;
      os.precision(17);
      os << "branch (" << seed.i << "," << seed.j << ") stalled at s=" << s << " with last good point "
         << describe(lerp(seed_params, target, s)) << ", beta=" << beta;
      throw ConvergenceError("exponents", op, os.str());
    }
  }
  out.beta = beta;
  finalize_branch(target, out);
  return out;
}

namespace {

// Seeds on the nearest axis, ordered so index 0 lies below i and index 1 above.
std::array<ExponentBranch, 2> axis_seeds(const JunctionParams& seed_p, int i) {
  std::array<ExponentBranch, 2> seeds;
  if (seed_p.a == 0.0 && seed_p.b == 0.0) {
    for (int j = 1; j <= 2; ++j) {
      seeds[j - 1].i = i;
      seeds[j - 1].j = j;
      seeds[j - 1].beta = i;
    }
    return seeds;
  }
  ExponentBranch lo = axis_branch(seed_p, i, -1);
  ExponentBranch hi = axis_branch(seed_p, i, +1);
  if (lo.beta > hi.beta) std::swap(lo, hi);
  lo.j = 1;
  hi.j = 2;
  return {lo, hi};
}

ExponentBranch failed_branch(int i, int j, const std::string& why) {
  ExponentBranch br;
  br.i = i;
  br.j = j;
  br.beta = std::numeric_limits<double>::quiet_NaN();
  br.converged = false;
  br.degenerate = true;
  br.note = why;
  return br;
}

}  // namespace

std::array<ExponentBranch, 2> family_branches(const JunctionParams& p, int i, const ContinuationOptions& opt) {
  p.validate();
  const JunctionParams seed_p = nearest_axis_point(p);
  const auto seeds = axis_seeds(seed_p, i);
  return {continue_branch(p, seeds[0], seed_p, opt), continue_branch(p, seeds[1], seed_p, opt)};
}

std::vector<ExponentBranch> find_branches(const JunctionParams& p, int N, const ContinuationOptions& opt) {
  if (N < 0) throw DomainError("exponents", "find_branches", "N must be nonnegative");
  p.validate();
  std::vector<ExponentBranch> out;
  for (int j = 0; j < 3; ++j) {
    ExponentBranch b;
    b.i = 0;
    b.j = j;
    b.beta = 0.0;
    finalize_branch(p, b);
    out.push_back(b);
  }
  for (int i = 1; i <= N; ++i) {
    out.push_back(integer_branch(p, i));
    std::array<ExponentBranch, 2> seeds;
    const JunctionParams seed_p = nearest_axis_point(p);
    try {
      seeds = axis_seeds(seed_p, i);
    } catch (const Error& e) {
      out.push_back(failed_branch(i, 1, e.what()));
      out.push_back(failed_branch(i, 2, e.what()));
      continue;
    }
    // Sub-branches are continued independently so one failure does not hide the other.
    for (int j = 1; j <= 2; ++j) {
      try {
        ExponentBranch br = continue_branch(p, seeds[j - 1], seed_p, opt);
        // Re-derive the vectors at the target so fully degenerate points get an orthonormal set.
        finalize_branch(p, br);
        out.push_back(br);
      } catch (const Error& e) {
        out.push_back(failed_branch(i, j, e.what()));
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ExponentBranch& x, const ExponentBranch& y) {
    if (std::isnan(x.beta)) return false;
    if (std::isnan(y.beta)) return true;
    return x.beta < y.beta;
  });
  return out;
}

std::vector<ScanRow> degeneracy_scan(double theta1, double theta2, int grid, int N) {
  if (grid < 1) throw DomainError("exponents", "degeneracy_scan", "grid must be positive");
  std::vector<ScanRow> rows;
  rows.reserve(static_cast<std::size_t>(grid) * grid * 3 * (N + 1));
  for (int ia = 0; ia < grid; ++ia)
    for (int ib = 0; ib < grid; ++ib) {
      const double a = -1.0 + (2.0 * ia + 1.0) / grid;
      const double b = -1.0 + (2.0 * ib + 1.0) / grid;
      const JunctionParams p = JunctionParams::make(theta1, theta2, a, b);
      std::vector<ExponentBranch> brs = find_branches(p, N);
      std::sort(brs.begin(), brs.end(), [](const ExponentBranch& x, const ExponentBranch& y) {
        return x.i != y.i ? x.i < y.i : x.j < y.j;
      });
      for (const auto& br : brs)
        rows.push_back({a, b, br.i, br.j, br.beta, br.res_dir, br.res_neu, br.degenerate});
    }
  return rows;
}

}  // namespace trijunc
