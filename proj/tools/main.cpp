#include "trijunc/cornerbasis.hpp"
#include "trijunc/corner_rule.hpp"
#include "trijunc/discretize.hpp"
#include "trijunc/errors.hpp"
#include "trijunc/exponents.hpp"
#include "trijunc/geometry.hpp"
#include "trijunc/postproc.hpp"
#include "trijunc/solve.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace trijunc;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Config {
  std::string command;
  std::string geometry;
  std::string out = "out";
  std::string rule_path;
  std::string method = "gmres";
  double tol = 5e-15;
  int N = 5;
  std::uint64_t seed = 1;
  int grid = 21;
  int panels = 3;
  int smooth_order = 16;
  std::vector<double> theta;
  int family = 0;
  int cells = 3;
  double perturbation = 0.1;
  bool dump_matrix = false;
};

// CSV writer with a fixed header and round-trip number formatting.
class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw ValidationError("cli", "run", "cannot write " + path.string());
    out_ << header << '\n';
  }
  template <typename... T>
  void row(const T&... v) {
    bool first = true;
    ((out_ << (first ? "" : ",") << fmt(v), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
  }
  static std::string fmt(int x) { return std::to_string(x); }
  static std::string fmt(bool x) { return x ? "1" : "0"; }
  static std::string fmt(const std::string& s) { return s; }
  std::ofstream out_;
};

json report_json(const SolveReport& r) {
  return {{"method", to_string(r.method)}, {"iterations", r.iterations}, {"residual", r.residual}, {"elapsed_s", r.elapsed}};
}

DiscretizationOptions disc_options(const Config& c) {
  DiscretizationOptions d;
  d.panels_per_edge = c.panels;
  d.smooth_order = c.smooth_order;
  return d;
}

std::string rule_path(const Config& c) {
  if (!c.rule_path.empty()) return c.rule_path;
  if (const char* env = std::getenv("TRIJUNC_RULE_CACHE"); env && *env) return env;
  return (fs::path(c.out) / "corner_rule.json").string();
}

CornerRule get_rule(const Config& c, json& manifest) {
  bool built = false;
  const std::string path = rule_path(c);
  CornerRule r = load_or_build_rule(path, 50.0, 1e-13, &built);
  manifest["rule"] = {{"path", path}, {"hash", hash_hex(r.hash())}, {"k", r.k}, {"built", built}, {"condV", r.condV}};
  return r;
}

CompositeMesh require_geometry(const Config& c) {
  if (c.geometry.empty()) throw ValidationError("cli", c.command, "--geometry is required");
  return load_geometry_file(c.geometry);
}

std::pair<double, double> require_theta(const Config& c) {
  if (c.theta.size() != 2) throw ValidationError("cli", c.command, "--theta needs two angles");
  return {c.theta[0], c.theta[1]};
}

void cmd_corner_rule(const Config& c, json& m) {
  const CornerRule r = get_rule(c, m);
  const RuleValidation v = validate_corner_rule(r);
  m["results"] = {{"k", r.k},
                  {"sum_w_err", v.sum_w_err},
                  {"max_quad_err", v.max_quad_err},
                  {"max_interp_err", v.max_interp_err},
                  {"min_weight", v.min_weight},
                  {"condV", v.condV},
                  {"valid", v.ok}};
  Csv csv(fs::path(c.out) / "corner_rule.csv", "j,t,w");
  for (int j = 0; j < r.k; ++j) csv.row(j, r.nodes[j], r.weights[j]);
}

void cmd_solve(const Config& c, json& m) {
  const CompositeMesh mesh = require_geometry(c);
  const CornerRule rule = get_rule(c, m);
  const NystromSystem sys = assemble_Kdir(mesh, rule, disc_options(c));
  // Boundary data from the manufactured harmonic functions.
  std::map<int, std::vector<Vec2>> src;
  for (const auto& r : mesh.regions())
    if (r.id != 0) src[r.id] = manufactured_sources(mesh, r.id, 10);
  auto u = [&](int reg, const Vec2& x) { return reg == 0 ? 0.0 : manufactured_u(src.at(reg), x); };
  const EdgeFunction f = [&](int e, const Vec2& x) {
    const auto& ed = mesh.edges()[e];
    return mesh.region(ed.left_region).mu * u(ed.left_region, x) - mesh.region(ed.right_region).mu * u(ed.right_region, x);
  };
  const EdgeFunction g = [&](int e, const Vec2& x) {
    const auto& ed = mesh.edges()[e];
    auto dn = [&](int reg) {
      if (reg == 0) return 0.0;
      Vec2 gr = Vec2::Zero();
      for (const auto& s : src.at(reg)) gr += (x - s) / (x - s).squaredNorm();
      return gr.dot(ed.normal);
    };
    return mesh.region(ed.left_region).nu * dn(ed.left_region) - mesh.region(ed.right_region).nu * dn(ed.right_region);
  };
  const SolveMethod method = parse_method(c.method);
  const SolveResult sd = solve_dirichlet(sys, build_rhs_dirichlet(mesh, sys, f), method, c.tol);
  const SolveResult sn = solve_neumann_transpose(sys, build_rhs_neumann(mesh, sys, g), method, c.tol);
  m["solve_reports"] = {{"dirichlet", report_json(sd.report)}, {"neumann", report_json(sn.report)}};
  m["results"] = {{"dofs", sys.size()}};
  if (c.dump_matrix) {
    dump_matrix(sys, (fs::path(c.out) / "matrix.bin").string());
    m["results"]["matrix"] = "matrix.bin";
  }
  Csv csv(fs::path(c.out) / "densities.csv", "x,y,edge,sigma,rho_weak");
  for (int i = 0; i < sys.size(); ++i)
    csv.row(sys.nodes(0, i), sys.nodes(1, i), sys.node_edge[i], sd.x[i] / sys.sqrt_w[i], sn.x[i] / sys.sqrt_w[i]);
}

void cmd_verify(const Config& c, json& m) {
  const CompositeMesh mesh = require_geometry(c);
  const CornerRule rule = get_rule(c, m);
  ManufacturedOptions opt;
  opt.disc = disc_options(c);
  opt.method = parse_method(c.method);
  opt.tol = c.tol;
  opt.grid = c.grid;
  const ManufacturedReport rep = manufactured_test(mesh, rule, opt);
  json per_region;
  for (const auto& [id, e] : rep.region_max_err) per_region[std::to_string(id)] = e;
  m["solve_reports"] = {{"dirichlet", report_json(rep.dirichlet)}, {"neumann", report_json(rep.neumann)}};
  m["results"] = {{"max_err", rep.max_err}, {"region_max_err", per_region}, {"targets", rep.targets}, {"dofs", rep.dofs}};
  Csv csv(fs::path(c.out) / "error_map.csv", "x,y,region,abs_err");
  for (const auto& s : rep.samples) csv.row(s.x, s.y, s.region, s.abs_err);
}

void cmd_exponents(const Config& c, json& m) {
  const auto [t1, t2] = require_theta(c);
  if (c.grid < 1) throw DomainError("cli", "exponents", "--grid must be positive");
  Csv csv(fs::path(c.out) / "exponents.csv", "a,b,i,j,beta,converged,degenerate");
  int ok = 0, total = 0;
  const int lo = c.family > 0 ? c.family : 1;
  const int hi = c.family > 0 ? c.family : c.N;
  for (int ia = 0; ia < c.grid; ++ia)
    for (int ib = 0; ib < c.grid; ++ib) {
      const double a = -1.0 + (2.0 * ia + 1.0) / c.grid;
      const double b = -1.0 + (2.0 * ib + 1.0) / c.grid;
      const JunctionParams p = JunctionParams::make(t1, t2, a, b);
      for (int i = lo; i <= hi; ++i) {
        std::array<ExponentBranch, 2> brs;
        bool conv = true;
        try {
          brs = family_branches(p, i);
        } catch (const Error&) {
          conv = false;
        }
        for (int j = 1; j <= 2; ++j) {
          const auto& br = brs[j - 1];
          const bool good = conv && br.converged;
          ok += good;
          ++total;
          csv.row(a, b, i, j, good ? br.beta : std::nan(""), good, good && br.degenerate);
        }
      }
    }
  m["results"] = {{"points", c.grid * c.grid}, {"branches", total}, {"converged", ok}};
}

void cmd_degeneracy_scan(const Config& c, json& m) {
  const auto [t1, t2] = require_theta(c);
  const auto rows = degeneracy_scan(t1, t2, c.grid, c.N);
  Csv csv(fs::path(c.out) / "degeneracy_scan.csv", "a,b,i,j,beta,res_dir,res_neu,degenerate");
  int deg = 0;
  for (const auto& r : rows) {
    deg += r.degenerate;
    csv.row(r.a, r.b, r.i, r.j, r.beta, r.res_dir, r.res_neu, r.degenerate);
  }
  m["results"] = {{"rows", static_cast<int>(rows.size())}, {"degenerate", deg}};
}

void cmd_sweep_ab(const Config& c, json& m) {
  const CornerRule rule = get_rule(c, m);
  AbSweepOptions opt;
  opt.grid = c.grid;
  opt.disc = disc_options(c);
  const auto regs = ab_materials(0.0, 0.0, opt);
  CompositeMesh templ;
  if (!c.geometry.empty()) {
    templ = load_geometry_file(c.geometry);
  } else {
    const auto [t1, t2] = c.theta.size() == 2 ? std::make_pair(c.theta[0], c.theta[1])
                                              : std::make_pair(std::numbers::pi / std::sqrt(2.0), std::numbers::pi / std::sqrt(3.0));
    templ = junction_disc_template(t1, t2, regs, c.panels);
  }
  const auto rows = sweep_ab(templ, rule, opt);
  Csv csv(fs::path(c.out) / "sweep_ab.csv", "a,b,cond");
  double mx = 0.0;
  for (const auto& r : rows) {
    csv.row(r.a, r.b, r.cond);
    if (std::isfinite(r.cond)) mx = std::max(mx, r.cond);
  }
  m["results"] = {{"rows", static_cast<int>(rows.size())}, {"max_cond", mx}};
}

void cmd_sweep_angles(const Config& c, json& m) {
  const CornerRule rule = get_rule(c, m);
  AngleSweepOptions opt;
  opt.grid = c.grid;
  opt.disc = disc_options(c);
  const auto rows = sweep_angles(rule, opt);
  Csv csv(fs::path(c.out) / "sweep_angles.csv", "theta1,theta2,region,cond");
  double mx = 0.0;
  int skipped = 0;
  for (const auto& r : rows) {
    csv.row(r.theta1, r.theta2, r.region, r.cond);
    if (std::isfinite(r.cond)) mx = std::max(mx, r.cond);
    else ++skipped;
  }
  m["results"] = {{"rows", static_cast<int>(rows.size())}, {"max_cond", mx}, {"skipped", skipped}};
}

void cmd_polarization(const Config& c, json& m) {
  const CornerRule rule = get_rule(c, m);
  CompositeMesh mesh;
  if (!c.geometry.empty()) {
    mesh = load_geometry_file(c.geometry);
  } else {
    LatticeOptions lo;
    lo.cells_across = c.cells;
    lo.perturbation = c.perturbation;
    lo.seed = c.seed;
    lo.panels_per_edge = c.panels;
    const LatticeResult lat = lattice_generator(lo);
    mesh = lat.mesh;
    m["lattice"] = {{"cells_across", c.cells},
                    {"regions", static_cast<int>(mesh.regions().size()) - 1},
                    {"vertices", static_cast<int>(mesh.vertices().size())},
                    {"edges", static_cast<int>(mesh.edges().size())},
                    {"perturbation_used", lat.perturbation_used}};
    std::ofstream(fs::path(c.out) / "lattice.json") << dump_geometry(mesh);
  }
  const PolarizationResult r = polarization(mesh, rule, disc_options(c), parse_method(c.method), c.tol);
  m["solve_reports"] = {{"g1", report_json(r.reports[0])}, {"g2", report_json(r.reports[1])}};
  m["results"] = {{"P", {{r.P(0, 0), r.P(0, 1)}, {r.P(1, 0), r.P(1, 1)}}},
                  {"asymmetry", std::abs(r.P(0, 1) - r.P(1, 0))},
                  {"total_charge", {r.total_charge[0], r.total_charge[1]}},
                  {"dofs", r.dofs}};
  Csv csv(fs::path(c.out) / "polarization.csv", "P11,P12,P21,P22,iterations");
  csv.row(r.P(0, 0), r.P(0, 1), r.P(1, 0), r.P(1, 1), r.reports[0].iterations + r.reports[1].iterations);
}

void validate(const Config& c) {
  if (!(c.tol > 0.0 && c.tol <= 1e-6)) throw ValidationError("cli", c.command, "--tol must lie in (0, 1e-6]");
  if (c.N < 0) throw ValidationError("cli", c.command, "--N must be nonnegative");
  if (c.grid < 1) throw ValidationError("cli", c.command, "--grid must be positive");
  if (c.panels < 2) throw ValidationError("cli", c.command, "--panels-per-edge must be at least 2");
  if (c.smooth_order < 2) throw ValidationError("cli", c.command, "--smooth-order must be at least 2");
  parse_method(c.method);
}

json error_json(const std::string& kind, const std::string& module, const std::string& op, const std::string& msg) {
  return {{"error", {{"kind", kind}, {"module", module}, {"operation", op}, {"message", msg}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmission problems on polygonal composites with triple junctions"};
  app.require_subcommand(1);
  Config cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--geometry", cfg.geometry, "Geometry JSON file");
    sub->add_option("--out", cfg.out, "Output directory")->capture_default_str();
    sub->add_option("--rule", cfg.rule_path, "Corner rule cache file");
    sub->add_option("--tol", cfg.tol, "Solver relative residual tolerance")->capture_default_str();
    sub->add_option("--N", cfg.N, "Highest exponent family")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    sub->add_option("--grid", cfg.grid, "Grid size per axis")->capture_default_str();
    sub->add_option("--panels-per-edge", cfg.panels, "Panels on each edge")->capture_default_str();
    sub->add_option("--smooth-order", cfg.smooth_order, "Gauss-Legendre order on smooth panels")->capture_default_str();
    sub->add_option("--method", cfg.method, "Linear solver: lu or gmres")->capture_default_str();
    sub->add_option("--theta", cfg.theta, "Junction angles theta1 theta2")->expected(2);
  };
  std::map<std::string, std::function<void(const Config&, json&)>> handlers{
      {"solve", cmd_solve},
      {"verify", cmd_verify},
      {"exponents", cmd_exponents},
      {"degeneracy-scan", cmd_degeneracy_scan},
      {"corner-rule", cmd_corner_rule},
      {"sweep-ab", cmd_sweep_ab},
      {"sweep-angles", cmd_sweep_angles},
      {"polarization", cmd_polarization}};
  const std::map<std::string, std::string> help{
      {"solve", "Solve both integral equations with manufactured data; write densities"},
      {"verify", "Manufactured-solution error map"},
      {"exponents", "Continued singular exponents over an (a, b) grid"},
      {"degeneracy-scan", "Residuals and degeneracy flags of all branches over an (a, b) grid"},
      {"corner-rule", "Build or load the cached corner quadrature rule"},
      {"sweep-ab", "Condition number over material parameters (a, b)"},
      {"sweep-angles", "Condition number over junction angles"},
      {"polarization", "Polarization tensor of a perturbed hexagonal lattice or a given geometry"}};
  for (const auto& [name, fn] : handlers) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    common(sub);
    if (name == "exponents") sub->add_option("--family", cfg.family, "Only this family i (0: all up to N)");
    if (name == "polarization") {
      sub->add_option("--cells", cfg.cells, "Hexagonal cells across (odd)")->capture_default_str();
      sub->add_option("--perturbation", cfg.perturbation, "Vertex perturbation fraction")->capture_default_str();
    }
    if (name == "solve") sub->add_flag("--dump-matrix", cfg.dump_matrix, "Write the Dirichlet matrix to matrix.bin");
    sub->callback([&cfg, name = name] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << error_json("ParseError", "cli", "parse", e.what()).dump() << '\n';
    return 2;
  }

  json manifest;
  manifest["command"] = cfg.command;
  manifest["version"] = kVersion;
  manifest["inputs"] = {{"geometry", cfg.geometry}, {"tol", cfg.tol},      {"N", cfg.N},
                        {"seed", cfg.seed},         {"grid", cfg.grid},    {"panels_per_edge", cfg.panels},
                        {"smooth_order", cfg.smooth_order}, {"method", cfg.method}, {"theta", cfg.theta}};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fs::create_directories(cfg.out);
    validate(cfg);
    handlers.at(cfg.command)(cfg, manifest);
  } catch (const Error& e) {
    const json err = error_json(e.kind(), e.module(), e.op(), e.message());
    std::cerr << err.dump() << '\n';
    std::ofstream(fs::path(cfg.out) / "error.json") << err.dump(2) << '\n';
    return 1;
  } catch (const std::exception& e) {
    const json err = error_json("Error", "cli", cfg.command, e.what());
    std::cerr << err.dump() << '\n';
    return 1;
  }
  manifest["timings"] = {{"total_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  std::ofstream(fs::path(cfg.out) / "manifest.json") << manifest.dump(2) << '\n';
  std::cout << manifest.dump(2) << '\n';
  return 0;
}
