// SPDX-License-Identifier: Apache-2.0
//
// Serial reference vs OpenMP kernels. Run with --benchmark_filter=... ;
// thread count follows OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "ordrm/batch.hpp"
#include "ordrm/data.hpp"
#include "ordrm/losses.hpp"
#include "ordrm/scorer.hpp"
#include "ordrm/thresholds.hpp"
#include "ordrm/train.hpp"

namespace {

using namespace ordrm;

struct Fixture {
  Dataset ds;
  RewardScorer scorer;
  Thresholds th;
  LossSpec spec;
  std::vector<int> indices;
};

Fixture make_fixture(int n, ScorerKind kind) {
  const int d = 16;
  const int K = 3;
  RewardScorer truth = RewardScorer::random_init(ScorerKind::kLinear, d, 0, 1);
  Thresholds th(K, ThresholdMode::kSymmetric,
                {-2.0, -1.2, -0.4, 0.4, 1.2, 2.0});
  GenConfig cfg{n, d, K, truth, th, 1.0, 7};
  Fixture fx{generate(cfg),
             RewardScorer::random_init(kind, d, 32, 2),
             th,
             LossSpec::with_defaults(LossKind::kOrdinalNll, K),
             {}};
  fx.indices.resize(n);
  std::iota(fx.indices.begin(), fx.indices.end(), 0);
  return fx;
}

void bm_loss_grad_serial(benchmark::State& state, ScorerKind kind) {
  const Fixture fx = make_fixture(static_cast<int>(state.range(0)), kind);
  for (auto _ : state) {
    auto acc = batch::serial_loss_grad(fx.ds, fx.indices, fx.scorer, &fx.th,
                                       fx.spec, true);
    benchmark::DoNotOptimize(acc.loss_sum);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_loss_grad_parallel(benchmark::State& state, ScorerKind kind) {
  const Fixture fx = make_fixture(static_cast<int>(state.range(0)), kind);
  for (auto _ : state) {
    auto acc = batch::parallel_loss_grad(fx.ds, fx.indices, fx.scorer, &fx.th,
                                         fx.spec, true);
    benchmark::DoNotOptimize(acc.loss_sum);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_generate_serial(benchmark::State& state) {
  const int d = 16;
  RewardScorer truth = RewardScorer::random_init(ScorerKind::kLinear, d, 0, 1);
  Thresholds th(3, ThresholdMode::kSymmetric, {-2.0, -1.2, -0.4, 0.4, 1.2, 2.0});
  GenConfig cfg{static_cast<int>(state.range(0)), d, 3, truth, th, 1.0, 7};
  for (auto _ : state) {
    Dataset ds = generate(cfg, false);
    benchmark::DoNotOptimize(ds.examples.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_generate_parallel(benchmark::State& state) {
  const int d = 16;
  RewardScorer truth = RewardScorer::random_init(ScorerKind::kLinear, d, 0, 1);
  Thresholds th(3, ThresholdMode::kSymmetric, {-2.0, -1.2, -0.4, 0.4, 1.2, 2.0});
  GenConfig cfg{static_cast<int>(state.range(0)), d, 3, truth, th, 1.0, 7};
  for (auto _ : state) {
    Dataset ds = generate(cfg, true);
    benchmark::DoNotOptimize(ds.examples.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK_CAPTURE(bm_loss_grad_serial, linear, ScorerKind::kLinear)
    ->Arg(1024)->Arg(8192);
BENCHMARK_CAPTURE(bm_loss_grad_parallel, linear, ScorerKind::kLinear)
    ->Arg(1024)->Arg(8192);
BENCHMARK_CAPTURE(bm_loss_grad_serial, mlp, ScorerKind::kMlp)
    ->Arg(1024)->Arg(8192);
BENCHMARK_CAPTURE(bm_loss_grad_parallel, mlp, ScorerKind::kMlp)
    ->Arg(1024)->Arg(8192);
BENCHMARK(bm_generate_serial)->Arg(16384);
BENCHMARK(bm_generate_parallel)->Arg(16384);

}  // namespace

BENCHMARK_MAIN();
