#include <benchmark/benchmark.h>

#include <cmath>

#include "udn/analysis.hpp"
#include "udn/montecarlo.hpp"
#include "udn/pathloss.hpp"
#include "udn/specfun.hpp"

namespace {

const udn::PathLossModel kModel =
    udn::PathLossModel::bounded_dual_slope(1.0, 70.0, 2.5, 4.0);

udn::NetworkScenario scenario(double lb_km2, double lu_km2) {
  udn::NetworkScenario s;
  s.lambda_b = lb_km2 * 1e-6;
  s.lambda_u = lu_km2 * 1e-6;
  s.sir_threshold = 10.0;
  return s;
}

void HypFSmallArgument(benchmark::State& state) {
  double z = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(udn::hyp_F(0.8, z));
  }
}
BENCHMARK(HypFSmallArgument);

void HypFLargeArgument(benchmark::State& state) {
  double z = 4100.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(udn::hyp_F(0.8, z));
  }
}
BENCHMARK(HypFLargeArgument);

void Attenuation(benchmark::State& state) {
  double d = 0.0;
  for (auto _ : state) {
    d += 0.37;
    if (d > 400.0) d -= 400.0;
    benchmark::DoNotOptimize(kModel.attenuation(d));
  }
}
BENCHMARK(Attenuation);

void IntegrateExponential(benchmark::State& state) {
  const double inf = std::numeric_limits<double>::infinity();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        udn::integrate([](double x) { return std::exp(-x); }, 0.0, inf));
  }
}
BENCHMARK(IntegrateExponential);

void CoverageExact(benchmark::State& state) {
  const udn::NetworkScenario sc = scenario(1000.0, 200.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(udn::coverage_exact(kModel, sc).value);
  }
}
BENCHMARK(CoverageExact);

void CoverageGeneral(benchmark::State& state) {
  const udn::NetworkScenario sc = scenario(1000.0, 200.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(udn::coverage_general(kModel, sc).value);
  }
}
BENCHMARK(CoverageGeneral);

void SimulationTrial(benchmark::State& state) {
  const udn::NetworkScenario sc = scenario(100.0, 200.0);
  udn::SimConfig config;
  long trial = 0;
  for (auto _ : state) {
    udn::Rng rng = udn::make_trial_rng(7, static_cast<std::uint64_t>(trial++));
    const udn::Realization real =
        udn::build_realization(kModel, sc, config, trial);
    benchmark::DoNotOptimize(udn::sample_sir(real, kModel, rng));
  }
}
BENCHMARK(SimulationTrial);

}  // namespace

BENCHMARK_MAIN();
