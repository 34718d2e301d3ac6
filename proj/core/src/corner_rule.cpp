#include "trijunc/corner_rule.hpp"

#include "trijunc/errors.hpp"
#include "trijunc/quadrature.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

namespace trijunc {

namespace {

constexpr int kGridOrder = 30;
constexpr int kDyadicLevels = 40;
constexpr int kCandidatesPerPanel = 60;
constexpr int kRefineSweeps = 6;
constexpr int kTrialPositions = 19;

ReferenceGrid make_grid() {
  ReferenceGrid g;
  g.order = kGridOrder;
  g.panels.emplace_back(0.0, std::ldexp(1.0, -kDyadicLevels));
  for (int k = kDyadicLevels - 1; k >= 0; --k) g.panels.emplace_back(std::ldexp(1.0, -(k + 1)), std::ldexp(1.0, -k));
  const GaussRule& gl = gauss_legendre(kGridOrder);
  const int n = static_cast<int>(g.panels.size()) * kGridOrder;
  g.t.resize(n);
  g.w.resize(n);
  int idx = 0;
  for (const auto& [a, b] : g.panels)
    for (int j = 0; j < kGridOrder; ++j, ++idx) {
      g.t[idx] = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[j];
      g.w[idx] = 0.5 * (b - a) * gl.weights[j];
    }
  return g;
}

std::vector<double> training_betas(double beta_max) {
  std::vector<double> b{0.0};
  for (int k = 0; 0.5 + 0.01 * k < 2.0 - 1e-12; ++k) b.push_back(0.5 + 0.01 * k);
  for (int k = 0; 2.0 + 0.025 * k < std::min(10.0, beta_max) - 1e-12; ++k) b.push_back(2.0 + 0.025 * k);
  for (int k = 0; 10.0 + 0.05 * k <= beta_max + 1e-9; ++k) b.push_back(10.0 + 0.05 * k);
  return b;
}

std::vector<double> test_betas(int n_test, double beta_max) {
  std::vector<double> b{0.0};
  const int m = std::max(2, n_test - 1);
  for (int k = 0; k < m; ++k) b.push_back(0.5 + (beta_max - 0.5) * k / (m - 1));
  return b;
}

double condition(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  return s[0] / s[s.size() - 1];
}

// Basis values at arbitrary points via piecewise interpolation from the grid.
Eigen::MatrixXd basis_at(const ReferenceGrid& g, const Eigen::MatrixXd& grid_basis, const Eigen::VectorXd& ts) {
  const int r = static_cast<int>(grid_basis.cols());
  Eigen::MatrixXd out(ts.size(), r);
  const GaussRule& gl = gauss_legendre(g.order);
  std::vector<double> l(g.order);
  for (int j = 0; j < ts.size(); ++j) {
    const int p = g.panel_of(ts[j]);
    const auto [a, b] = g.panels[p];
    lagrange_basis(gl, 2.0 * (ts[j] - a) / (b - a) - 1.0, l.data());
    out.row(j).setZero();
    for (int q = 0; q < g.order; ++q) out.row(j) += l[q] * grid_basis.row(p * g.order + q);
  }
  return out;
}

struct Candidate {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::MatrixXd phi;
  double cond = 0.0;
  double objective = 0.0;
};

Candidate evaluate(const ReferenceGrid& g, const Eigen::MatrixXd& grid_basis, const Eigen::VectorXd& integrals,
                   const Eigen::VectorXd& ts) {
  Candidate c;
  c.nodes = ts;
  c.phi = basis_at(g, grid_basis, ts);
  c.weights = c.phi.transpose().partialPivLu().solve(integrals);
  const Eigen::VectorXd sw = c.weights.cwiseAbs().cwiseSqrt();
  c.cond = condition(sw.asDiagonal() * c.phi);
  double penalty = 0.0;
  bool negative = false;
  for (int j = 0; j < ts.size(); ++j)
    if (c.weights[j] < 0) {
      negative = true;
      penalty += 1e5 * c.weights[j] * c.weights[j] / ts[j];
    }
  c.objective = std::log(c.cond) + penalty + (negative ? 100.0 : 0.0);
  if (!std::isfinite(c.objective)) c.objective = 1e300;
  return c;
}

CornerRule finish(const Candidate& c, const Eigen::MatrixXd& grid_basis, double beta_max, double tol) {
  CornerRule rule;
  rule.k = static_cast<int>(c.nodes.size());
  rule.nodes = c.nodes;
  rule.weights = c.weights;
  rule.basis_at_nodes = c.phi;
  rule.grid_basis = grid_basis;
  const Eigen::VectorXd sw = c.weights.cwiseSqrt();
  const Eigen::MatrixXd scaled = sw.asDiagonal() * c.phi;
  rule.V = scaled.inverse();
  rule.condV = condition(scaled);
  rule.beta_max = beta_max;
  rule.tol = tol;
  return rule;
}

void fnv1a(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

}  // namespace

int ReferenceGrid::panel_of(double x) const {
  int lo = 0, hi = static_cast<int>(panels.size()) - 1;
  if (x <= panels[0].second) return 0;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (panels[mid].first <= x) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

void ReferenceGrid::interp_row(double x, Eigen::Ref<Eigen::RowVectorXd> row) const {
  row.setZero();
  const int p = panel_of(x);
  const auto [a, b] = panels[p];
  std::vector<double> l(order);
  lagrange_basis(gauss_legendre(order), 2.0 * (x - a) / (b - a) - 1.0, l.data());
  for (int q = 0; q < order; ++q) row[p * order + q] = l[q];
}

const ReferenceGrid& reference_grid() {
  static const ReferenceGrid g = make_grid();
  return g;
}

Eigen::MatrixXd CornerRule::grid_interp() const {
  return grid_basis * basis_at_nodes.partialPivLu().inverse();
}

std::uint64_t CornerRule::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  fnv1a(h, &k, sizeof(k));
  fnv1a(h, nodes.data(), sizeof(double) * nodes.size());
  fnv1a(h, weights.data(), sizeof(double) * weights.size());
  fnv1a(h, V.data(), sizeof(double) * V.size());
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CornerRule build_corner_rule(double beta_max, double tol) {
  if (!(beta_max >= 1.0) || !(tol > 0.0)) throw DomainError("cornerbasis", "build_corner_rule", "bad parameters");
  const ReferenceGrid& g = reference_grid();
  const int n = static_cast<int>(g.t.size());
  const std::vector<double> betas = training_betas(beta_max);
  const Eigen::VectorXd sw = g.w.cwiseSqrt();

  Eigen::MatrixXd A(n, betas.size());
  for (std::size_t c = 0; c < betas.size(); ++c)
    for (int i = 0; i < n; ++i) A(i, c) = sw[i] * std::pow(g.t[i], betas[c]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::VectorXd rdiag = qr.matrixR().diagonal().cwiseAbs();
  int r0 = 0;
  while (r0 < rdiag.size() && rdiag[r0] > tol * rdiag[0]) ++r0;
  const int rmax = std::min<int>(r0 + 10, static_cast<int>(betas.size()));
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, rmax);

  // Candidate points, equispaced within each graded panel (the innermost panel is skipped).
  Eigen::VectorXd cand((g.panels.size() - 1) * kCandidatesPerPanel);
  Eigen::VectorXd omega(cand.size());
  for (std::size_t p = 1, idx = 0; p < g.panels.size(); ++p)
    for (int j = 0; j < kCandidatesPerPanel; ++j, ++idx) {
      const auto [a, b] = g.panels[p];
      cand[idx] = a + (b - a) * (j + 0.5) / kCandidatesPerPanel;
      omega[idx] = (b - a) / kCandidatesPerPanel;
    }

  std::string last_failure;
  for (int r = r0; r <= rmax; r += 2) {
    const Eigen::MatrixXd Qr = Q.leftCols(r);
    const Eigen::MatrixXd grid_basis = sw.cwiseInverse().asDiagonal() * Qr;
    const Eigen::VectorXd integrals = Qr.transpose() * sw;

    // Greedy volume maximisation over the candidates picks the starting nodes.
    const Eigen::MatrixXd phic = basis_at(g, grid_basis, cand);
    const Eigen::MatrixXd M = (omega.cwiseSqrt().asDiagonal() * phic).transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> pq(M);
    Eigen::VectorXd ts(r);
    for (int j = 0; j < r; ++j) ts[j] = cand[pq.colsPermutation().indices()[j]];
    std::sort(ts.data(), ts.data() + r);

    // Coordinate descent on node positions: lower cond(V), push weights positive.
    Candidate best = evaluate(g, grid_basis, integrals, ts);
    for (int sweep = 0; sweep < kRefineSweeps; ++sweep) {
      for (int k = 0; k < r; ++k) {
        const double lo = k > 0 ? best.nodes[k - 1] : 0.0;
        const double hi = k < r - 1 ? best.nodes[k + 1] : 1.0;
        for (int q = 0; q < kTrialPositions; ++q) {
          const double f = 0.05 + 0.9 * q / (kTrialPositions - 1);
          const double trial = (lo <= 0.0 || hi / lo < 4.0) ? lo + (hi - lo) * f
                                                            : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * f);
          Eigen::VectorXd tt = best.nodes;
          tt[k] = trial;
          Candidate c = evaluate(g, grid_basis, integrals, tt);
          if (c.objective < best.objective) best = std::move(c);
        }
      }
    }
    CornerRule rule = finish(best, grid_basis, beta_max, tol);
    const RuleValidation v = validate_corner_rule(rule, 500, beta_max);
    if (v.ok) return rule;
    std::ostringstream os;
    os << "rank " << r << ": min weight " << v.min_weight << ", quadrature error " << v.max_quad_err
       << ", interpolation error " << v.max_interp_err << ", cond " << v.condV;
    last_failure = os.str();
  }
  throw ConvergenceError("cornerbasis", "build_corner_rule", "validation failed up to rank r+10; " + last_failure);
}

RuleValidation validate_corner_rule(const CornerRule& rule, int n_test, double beta_max) {
  const ReferenceGrid& g = reference_grid();
  RuleValidation v;
  v.k = rule.k;
  v.condV = rule.condV;
  v.min_weight = rule.weights.minCoeff();
  v.sum_w_err = std::abs(rule.weights.sum() - 1.0);
  const auto lu = rule.basis_at_nodes.partialPivLu();
  for (double beta : test_betas(n_test, beta_max)) {
    const Eigen::VectorXd f = rule.nodes.array().pow(beta);
    v.max_quad_err = std::max(v.max_quad_err, std::abs(rule.weights.dot(f) - 1.0 / (beta + 1.0)));
    const Eigen::VectorXd coef = lu.solve(f);
    const Eigen::VectorXd err = g.t.array().pow(beta).matrix() - rule.grid_basis * coef;
    v.max_interp_err = std::max(v.max_interp_err, std::sqrt(g.w.dot(err.cwiseAbs2())));
  }
  v.ok = v.min_weight > 0.0 && v.sum_w_err <= 1e-13 && v.max_quad_err <= 1e-12 && v.max_interp_err <= 1e-12 &&
         v.condV <= 100.0 && v.k <= 50;
  return v;
}

std::string rule_to_json(const CornerRule& rule) {
  nlohmann::json j;
  j["format"] = "trijunc-corner-rule";
  j["version"] = 1;
  j["k"] = rule.k;
  j["beta_max"] = rule.beta_max;
  j["tol"] = rule.tol;
  j["condV"] = rule.condV;
  j["hash"] = hash_hex(rule.hash());
  j["nodes"] = std::vector<double>(rule.nodes.data(), rule.nodes.data() + rule.nodes.size());
  j["weights"] = std::vector<double>(rule.weights.data(), rule.weights.data() + rule.weights.size());
  auto mat = [](const Eigen::MatrixXd& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < M.rows(); ++i) {
      std::vector<double> row(M.cols());
      for (int c = 0; c < M.cols(); ++c) row[c] = M(i, c);
      rows.push_back(row);
    }
    return rows;
  };
  j["V"] = mat(rule.V);
  j["basis_at_nodes"] = mat(rule.basis_at_nodes);
  j["grid_basis"] = mat(rule.grid_basis);
  return j.dump();
}

CornerRule rule_from_json(const std::string& text) {
  const std::string op = "rule_from_json";
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "trijunc-corner-rule" || j.at("version") != 1)
      throw ParseError("cornerbasis", op, "unrecognised rule file format");
    CornerRule r;
    r.k = j.at("k").get<int>();
    r.beta_max = j.at("beta_max").get<double>();
    r.tol = j.at("tol").get<double>();
    r.condV = j.at("condV").get<double>();
    auto vec = [](const nlohmann::json& a) {
      const auto v = a.get<std::vector<double>>();
      return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
    };
    auto mat = [](const nlohmann::json& a) {
      Eigen::MatrixXd M(a.size(), a.empty() ? 0 : a[0].size());
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t c = 0; c < a[i].size(); ++c) M(i, c) = a[i][c].get<double>();
      return M;
    };
    r.nodes = vec(j.at("nodes"));
    r.weights = vec(j.at("weights"));
    r.V = mat(j.at("V"));
    r.basis_at_nodes = mat(j.at("basis_at_nodes"));
    r.grid_basis = mat(j.at("grid_basis"));
    if (r.nodes.size() != r.k || r.weights.size() != r.k || r.V.rows() != r.k || r.V.cols() != r.k ||
        r.grid_basis.rows() != reference_grid().t.size() || r.grid_basis.cols() != r.k)
      throw ParseError("cornerbasis", op, "inconsistent array sizes");
    if (hash_hex(r.hash()) != j.at("hash").get<std::string>())
      throw ParseError("cornerbasis", op, "hash mismatch; cache file is corrupt");
    return r;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("cornerbasis", op, ex.what());
  }
}

CornerRule load_or_build_rule(const std::string& path, double beta_max, double tol, bool* built) {
  if (built) *built = false;
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      CornerRule r = rule_from_json(ss.str());
      if (r.beta_max == beta_max && r.tol == tol) return r;
    } catch (const ParseError&) {
      // Fall through and rebuild a corrupt or stale cache.
    }
  }
  CornerRule r = build_corner_rule(beta_max, tol);
  if (built) *built = true;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ValidationError("cornerbasis", "load_or_build_rule", "cannot write " + tmp);
    out << rule_to_json(r);
  }
  std::filesystem::rename(tmp, path);
  return r;
}

const CornerRule& default_corner_rule() {
  static std::once_flag once;
  static CornerRule rule;
  std::call_once(once, [] {
    const char* path = std::getenv("TRIJUNC_RULE_CACHE");
    rule = (path && *path) ? load_or_build_rule(path) : build_corner_rule();
  });
  return rule;
}

}  // namespace trijunc
