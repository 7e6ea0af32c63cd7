// Copyright 2026 The SynthAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Microbenchmarks for the hot paths: the brute-force neighbor kernel, one
// privacy evaluation, an EM fit and a padded distance query.

#include <cstddef>
#include <vector>

#include "benchmark/benchmark.h"
#include "synthaudit/attacks.h"
#include "synthaudit/metrics.h"
#include "synthaudit/mixture.h"
#include "synthaudit/provider.h"
#include "synthaudit/tabular.h"

namespace synthaudit {
namespace {

// Queries against a reference of state.range(0) rows.
void BM_NnHamming(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Dataset ref = GenCensusLite(n, 1);
  Dataset q = GenCensusLite(256, 2);
  NnIndex index(ref, Metric::kHamming);
  for (auto _ : state) {
    for (std::size_t i = 0; i < q.num_rows(); ++i) {
      benchmark::DoNotOptimize(index.Query(q.row(i)));
    }
  }
  state.SetItemsProcessed(state.iterations() * q.num_rows());
}
BENCHMARK(BM_NnHamming)->Arg(1000)->Arg(3000)->Arg(10000);

void BM_NnEuclidean(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Dataset ref = GenGauss(static_cast<std::size_t>(state.range(1)), n, 1);
  Dataset q = GenGauss(static_cast<std::size_t>(state.range(1)), 256, 2);
  NnIndex index(ref, Metric::kEuclidean);
  for (auto _ : state) {
    for (std::size_t i = 0; i < q.num_rows(); ++i) {
      benchmark::DoNotOptimize(index.Query(q.row(i)));
    }
  }
  state.SetItemsProcessed(state.iterations() * q.num_rows());
}
BENCHMARK(BM_NnEuclidean)->Args({1000, 2})->Args({1000, 25})->Args({10000, 2});

// One provider-side evaluation of a train-sized synthetic sample.
void BM_EvaluatePrivacy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto [train, test] = Split(GenCensusLite(2 * n, 3), 4);
  MetricsEvaluator evaluator(train, test, Metric::kHamming);
  Dataset synth = GenCensusLite(n, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluator.Evaluate(synth));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EvaluatePrivacy)->Arg(500)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_FitGmm(benchmark::State& state) {
  Dataset data = GenCensusLite(static_cast<std::size_t>(state.range(0)), 6);
  const auto k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(FitGmm(data, k, {.seed = 7}));
  }
}
BENCHMARK(BM_FitGmm)->Args({3000, 10})->Args({9000, 10})->Unit(benchmark::kMillisecond);

// A padded distance query: one metrics call on padding copies plus one
// candidate, the unit cost of the reconstruction attacks.
void BM_ExtractDistance(benchmark::State& state) {
  ProviderConfig config;
  config.model.kind = ModelKind::kIndependent;
  Provider provider(GenCensusLite(6000, 8), config);
  AttackConfig attack;
  attack.n_train = provider.train_size();
  AttackSession session(provider, attack);
  PaddingRecord padding = BootstrapPadding(session, 100);
  Dataset candidates = GenCensusLite(64, 9);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ExtractDistance(
        session, padding, candidates.row(i++ % candidates.num_rows())));
  }
}
BENCHMARK(BM_ExtractDistance)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace synthaudit

BENCHMARK_MAIN();
