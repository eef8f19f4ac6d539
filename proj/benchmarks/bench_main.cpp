#include <benchmark/benchmark.h>

#include <cmath>

#include "conekit/geometry.hpp"
#include "conekit/harmonic_library.hpp"
#include "conekit/indicial.hpp"
#include "conekit/link_spectrum.hpp"
#include "conekit/mass_expansion.hpp"
#include "conekit/radial_modes.hpp"
#include "conekit/sphere_quadrature.hpp"

using namespace conekit;

static void BM_LensSpectrum(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lens_spectrum(3, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_LensSpectrum)->Arg(10)->Arg(30);

static void BM_ExceptionalSetD(benchmark::State& state) {
  const auto s = sphere_spectrum(5, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_D(s, 6));
}
BENCHMARK(BM_ExceptionalSetD)->Arg(8)->Arg(64);

static void BM_FunctionModeSolve(benchmark::State& state) {
  ModeProblem p;
  p.kind = ModeKind::Function;
  p.n = 4;
  p.eigenvalue = 3.0;
  p.rhs = [](double r) { return std::pow(r, -5.5); };
  p.rate = -3.5;
  p.options.points_per_decade = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_function_mode(p));
}
BENCHMARK(BM_FunctionModeSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_SphereIntegral(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_sphere(N, 1.0, [](const std::vector<double>& x) { return std::exp(x[0]); }));
}
BENCHMARK(BM_SphereIntegral)->Arg(3)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_ScalarCurvatureBurns(benchmark::State& state) {
  const auto g = kahler_metric(burns_potential(1.0));
  const std::vector<double> x = {1.1, 0.4, -0.7, 1.5};
  for (auto _ : state) benchmark::DoNotOptimize(scalar_curvature(g, x));
}
BENCHMARK(BM_ScalarCurvatureBurns);

static void BM_AdmIntegral(benchmark::State& state) {
  const auto g = schwarzschild(static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(adm_integrand(g, 100.0));
}
BENCHMARK(BM_AdmIntegral)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_BurnsMass(benchmark::State& state) {
  const auto g = make_family("burns", {{"c", 1.0}}).metric;
  for (auto _ : state) benchmark::DoNotOptimize(mass(g, {}));
}
BENCHMARK(BM_BurnsMass)->Unit(benchmark::kMillisecond);

static void BM_Obstruction(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(obstruction_dimensions(k));
}
BENCHMARK(BM_Obstruction)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
