#include "trijunc/cornerbasis.hpp"
#include "trijunc/corner_rule.hpp"
#include "trijunc/discretize.hpp"
#include "trijunc/exponents.hpp"
#include "trijunc/potentials.hpp"
#include "trijunc/solve.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace trijunc;

namespace {

const double kTheta1 = std::numbers::pi / std::sqrt(2.0);
const double kTheta2 = std::numbers::pi / std::sqrt(3.0);

void BM_SegmentSeries(benchmark::State& state) {
  SegmentPowerQuery q;
  q.beta = 2.37;
  q.theta0 = 1.9;
  q.t = 0.01 * static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(segment_dlp_power(q));
}
BENCHMARK(BM_SegmentSeries)->Arg(10)->Arg(50)->Arg(90);

void BM_FindBranches(benchmark::State& state) {
  const auto p = JunctionParams::make(kTheta1, kTheta2, 0.4, -0.3);
  for (auto _ : state) benchmark::DoNotOptimize(find_branches(p, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_FindBranches)->Arg(5)->Arg(10);

void BM_Completeness(benchmark::State& state) {
  const auto p = JunctionParams::make(kTheta1, kTheta2, 0.4, -0.3);
  for (auto _ : state) benchmark::DoNotOptimize(build_completeness(p, static_cast<int>(state.range(0))).condition);
}
BENCHMARK(BM_Completeness)->Arg(4)->Arg(8);

void BM_AssembleTwoTriangle(benchmark::State& state) {
  const CornerRule& rule = default_corner_rule();
  const CompositeMesh mesh = load_geometry_file(TRIJUNC_GEOMETRY_DIR "/two_triangle.json");
  DiscretizationOptions opt;
  opt.panels_per_edge = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_Kdir(mesh, rule, opt).size());
}
BENCHMARK(BM_AssembleTwoTriangle)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  const CornerRule& rule = default_corner_rule();
  const CompositeMesh mesh = load_geometry_file(TRIJUNC_GEOMETRY_DIR "/two_triangle.json");
  const NystromSystem sys = assemble_Kdir(mesh, rule);
  const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(sys.size());
  const SolveMethod method = state.range(0) == 0 ? SolveMethod::GMRES : SolveMethod::LU;
  for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet(sys, rhs, method).x.data());
}
BENCHMARK(BM_Solve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
