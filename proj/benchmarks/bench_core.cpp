// ============================================================
// Micro-benchmarks for the hot kernels: triple extension,
// hull construction, witness constructions, one solver restart.
// ============================================================

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "corpus.hpp"
#include "egw/graph.hpp"
#include "egw/hull.hpp"
#include "egw/optimize.hpp"
#include "egw/prob.hpp"
#include "egw/quantities.hpp"
#include "egw/region.hpp"

namespace {

void bm_extend(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const egw::JointPmf p = corpus::random_pmf(1, n, n);
  const egw::Channel c = corpus::random_channel(2, n, n, n + 2);
  for (auto _ : state) {
    const egw::TriplePmf tr = egw::extend(p, c);
    benchmark::DoNotOptimize(tr.ixyu());
  }
}
BENCHMARK(bm_extend)->Arg(2)->Arg(4)->Arg(6);

void bm_mi_point(benchmark::State& state) {
  const egw::JointPmf p = corpus::random_pmf(3, 4, 4);
  const egw::Channel c = corpus::random_channel(4, 4, 4, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(egw::mi_point(p, c));
  }
}
BENCHMARK(bm_mi_point);

void bm_convex_hull(benchmark::State& state) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<egw::Vec3> pts(static_cast<size_t>(state.range(0)));
  for (auto& q : pts) q = {uni(gen), uni(gen), uni(gen)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(egw::convex_hull(pts));
  }
}
BENCHMARK(bm_convex_hull)->Arg(32)->Arg(256);

void bm_frl_channel(benchmark::State& state) {
  const egw::JointPmf p = corpus::random_pmf(5, 4, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(egw::frl_channel(p, egw::FrlDirection::x_to_y));
  }
}
BENCHMARK(bm_frl_channel);

void bm_bvn_channel(benchmark::State& state) {
  const egw::JointPmf p = corpus::uniform33();
  for (auto _ : state) {
    benchmark::DoNotOptimize(egw::bvn_channel(p));
  }
}
BENCHMARK(bm_bvn_channel);

void bm_support_components(benchmark::State& state) {
  const egw::JointPmf p = corpus::two_block44();
  for (auto _ : state) {
    benchmark::DoNotOptimize(egw::support_components(p));
  }
}
BENCHMARK(bm_support_components);

void bm_support_function(benchmark::State& state) {
  const egw::JointPmf p = corpus::random_pmf(9, 2, 2);
  egw::OptimizerConfig cfg;
  cfg.restarts = static_cast<int>(state.range(0));
  cfg.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(egw::support_function(p, {1.0, 1.0, -2.0}, cfg));
  }
}
BENCHMARK(bm_support_function)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
