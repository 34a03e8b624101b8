// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "xbias/cgf.hpp"
#include "xbias/divergence.hpp"
#include "xbias/orlicz.hpp"
#include "xbias/simulate.hpp"

using namespace xbias;

namespace {

std::vector<double> simplex(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) total += (v = e(rng));
  for (auto& v : p) v /= total;
  return p;
}

void bm_inverse_conjugate_closed_form(benchmark::State& state) {
  const auto env = CgfEnvelope::sub_gamma(2.0, 0.5);
  double info = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse_conjugate(env, info));
    info = info < 10.0 ? info * 1.01 : 0.1;
  }
}
BENCHMARK(bm_inverse_conjugate_closed_form);

void bm_inverse_conjugate_mixed(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  std::vector<CgfEnvelope> envs;
  for (std::size_t i = 0; i < k; ++i) envs.push_back(CgfEnvelope::sub_exponential(1.0 + 0.1 * i, 1.0 + 0.05 * i));
  const MixedEnvelope mixed(simplex(k, 3), envs);
  for (auto _ : state) benchmark::DoNotOptimize(inverse_conjugate(mixed, 1.7));
}
BENCHMARK(bm_inverse_conjugate_mixed)->Arg(4)->Arg(64);

void bm_alpha_mutual_information(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const DiscreteJoint joint(side, side, simplex(side * side, 5));
  for (auto _ : state) benchmark::DoNotOptimize(alpha_mutual_information(joint, 1.5));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(side * side));
}
BENCHMARK(bm_alpha_mutual_information)->RangeMultiplier(4)->Range(8, 512)->Complexity();

void bm_amemiya_norm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.37 * i) * 3.0;
  const auto psi = OrliczFunction::power(3.0);
  for (auto _ : state) benchmark::DoNotOptimize(amemiya_norm(x, psi));
}
BENCHMARK(bm_amemiya_norm)->Arg(64)->Arg(4096);

void bm_run_experiment_argmax(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto model = MeasurementModel::heavy_tail(n, 3.0, 2.0, std::exp(1.0));
  ExperimentOptions o;
  o.trials = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(model, SelectionRule::argmax(), o).empirical_bias);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(o.trials * n));
}
BENCHMARK(bm_run_experiment_argmax)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void bm_run_experiment_softmax(benchmark::State& state) {
  const auto model = MeasurementModel::gaussian(100, 0.0, 1.0);
  ExperimentOptions o;
  o.trials = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(model, SelectionRule::softmax(0.5), o).empirical_bias);
}
BENCHMARK(bm_run_experiment_softmax)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
