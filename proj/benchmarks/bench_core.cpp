#include <cmath>
#include <numbers>

#include <benchmark/benchmark.h>

#include "ellab/elliptic.hpp"
#include "ellab/profile1d.hpp"
#include "ellab/quadrature.hpp"
#include "ellab/radial.hpp"
#include "ellab/trajectory.hpp"

using namespace ellab;

namespace {

std::vector<double> bump_trace(const Grid2D& g) {
  std::vector<double> u0(g.n2 + 1);
  for (int j = 0; j <= g.n2; ++j) {
    const double s = (j * g.h - 10.0) / 5.0;
    u0[j] = std::abs(s) < 1.0 ? 0.5 * std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
  }
  return u0;
}

void BM_Quadrature(benchmark::State& state) {
  const auto nl = Nonlinearity::abs_sin();
  const double cuts[] = {std::numbers::pi};
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate([&](double s) { return nl(s); }, 0.0, 6.0, cuts, 1e-13).value);
}
BENCHMARK(BM_Quadrature);

void BM_Profile(benchmark::State& state) {
  const auto nl = Nonlinearity::abs_sin();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_profile(nl, std::numbers::pi, 10.0, n).slope0);
}
BENCHMARK(BM_Profile)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_ZfCantor(benchmark::State& state) {
  const auto nl = Nonlinearity::cantor(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_Zf(nl).points.size());
}
BENCHMARK(BM_ZfCantor)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SolveQuarter(benchmark::State& state) {
  const auto nl = Nonlinearity::linear_decay();
  const double L1 = static_cast<double>(state.range(0));
  const Grid2D g = Grid2D::make(L1, L1 / 2.0, 0.25);
  const BoundarySpec bc = BoundarySpec::quarter(bump_trace(g));
  SolveOptions opt;
  opt.tol = 1e-10;
  for (auto _ : state) benchmark::DoNotOptimize(solve_quarter(nl, bc, g, opt).certificate()->residual);
  state.counters["unknowns"] = static_cast<double>(g.n1) * g.n2;
}
BENCHMARK(BM_SolveQuarter)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_Residual(benchmark::State& state) {
  const auto nl = Nonlinearity::logistic();
  const Grid2D g = Grid2D::make(60.0, 30.0, 0.25);
  const Field u(g, BoundarySpec::quarter(bump_trace(g)), 0.5);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(residual_norm(u, nl, threads));
}
BENCHMARK(BM_Residual)->Arg(1)->Arg(2);

void BM_OmegaLimit(benchmark::State& state) {
  const auto nl = Nonlinearity::linear_decay();
  const Grid2D g = Grid2D::make(60.0, 30.0, 0.25);
  SolveOptions opt;
  opt.tol = 1e-10;
  const Field u = solve_quarter(nl, BoundarySpec::quarter(bump_trace(g)), g, opt);
  const AttractorEstimate table = attractor_table(nl, 2.0, ProblemKind::quarter);
  for (auto _ : state) benchmark::DoNotOptimize(omega_limit(u, table.elements).final_distance);
}
BENCHMARK(BM_OmegaLimit)->Unit(benchmark::kMillisecond);

void BM_Eigenpair(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dirichlet_eigenpair(2, 1.0, n).lambda);
}
BENCHMARK(BM_Eigenpair)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
