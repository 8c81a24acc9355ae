// Microbenchmarks for the hot paths: the TV prox, the offline oracle, and a
// full meta-algorithm round at several pool sizes.
#include <benchmark/benchmark.h>

#include "tvdr/adversary.hpp"
#include "tvdr/meta.hpp"
#include "tvdr/oracle.hpp"

#include <random>

namespace {

std::vector<double> random_labels(long n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  std::vector<double> y(n);
  for (auto& v : y) v = u(rng);
  return y;
}

void bm_tv_prox(benchmark::State& state) {
  auto y = random_labels(state.range(0), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tvdr::tv_prox_1d(y, 1.5));
  }
}
BENCHMARK(bm_tv_prox)->Arg(1 << 12)->Arg(1 << 16);

void bm_oracle_1d(benchmark::State& state) {
  tvdr::OracleProblem p;
  p.B = 2.0;
  p.C_n = 4.0;
  tvdr::CurvatureInfo curv{2.0, 0.0, 4.0, 4.0, 2.0};
  for (double v : random_labels(state.range(0), 11)) {
    p.losses.push_back(tvdr::squared_loss(v / 2.0, curv));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(tvdr::solve_1d_squared(p));
  }
}
BENCHMARK(bm_oracle_1d)->Arg(1 << 12)->Arg(1 << 14);

void bm_flh_round(benchmark::State& state) {
  const long n = state.range(0);
  tvdr::CurvatureInfo curv{2.0, 0.0, 4.0, 4.0, 2.0};
  auto set = tvdr::box_set(2.0, 1);
  auto meta = tvdr::flh_init(
      set, tvdr::flh_meta_rate(curv, tvdr::GameKind::Squared), tvdr::Pruning::LogPool,
      [set] { return tvdr::ExpertState{tvdr::ogd_init(set, tvdr::OgdStepRule::InverseHalfT)}; });
  auto y = random_labels(n, 13);
  long t = 0;
  for (auto _ : state) {
    tvdr::flh_predict(meta);
    tvdr::flh_update(meta, tvdr::squared_loss(y[t % n] / 2.0, curv));
    ++t;
  }
}
BENCHMARK(bm_flh_round)->Arg(1 << 12);

}  // namespace

BENCHMARK_MAIN();
