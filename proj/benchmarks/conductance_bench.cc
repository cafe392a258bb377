/*
 * Copyright 2026 The Conductance Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "conductance/attribution.h"
#include "conductance/autodiff.h"
#include "conductance/zoo.h"

namespace conductance {
namespace {

struct Fixture {
  ZooModel model = ToyTextCnn();
  std::vector<Tensor> input;

  Fixture() {
    std::mt19937_64 rng(0);
    std::uniform_int_distribution<int32_t> tok(
        0, static_cast<int32_t>(model.embedding->dim(0)) - 1);
    std::vector<int32_t> ids(model.graph.node(model.graph.inputs()[0]).shape[0]);
    for (int32_t& t : ids) t = tok(rng);
    input = model.Embed(ids);
  }
};

const Fixture& TextCnn() {
  static const Fixture f;
  return f;
}

void BM_Forward(benchmark::State& state) {
  const Fixture& f = TextCnn();
  for (auto _ : state) benchmark::DoNotOptimize(Forward(f.model.graph, f.input));
}
BENCHMARK(BM_Forward);

void BM_Vjp(benchmark::State& state) {
  const Fixture& f = TextCnn();
  const ForwardTrace trace = Forward(f.model.graph, f.input);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Vjp(f.model.graph, trace, f.model.graph.output()));
  }
}
BENCHMARK(BM_Vjp);

void BM_Jvp(benchmark::State& state) {
  const Fixture& f = TextCnn();
  const ForwardTrace trace = Forward(f.model.graph, f.input);
  for (auto _ : state) benchmark::DoNotOptimize(Jvp(f.model.graph, trace, f.input));
}
BENCHMARK(BM_Jvp);

void BM_ConductanceTotal(benchmark::State& state) {
  const Fixture& f = TextCnn();
  const PathSpec path(f.model.ZeroBaseline(), f.input, static_cast<int>(state.range(0)));
  const LayerCut& cut = f.model.Cut("pooled");
  for (auto _ : state) benchmark::DoNotOptimize(ConductanceTotal(f.model.graph, path, cut));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConductanceTotal)->Arg(32)->Arg(128)->Arg(512);

void BM_IntegratedGradients(benchmark::State& state) {
  const Fixture& f = TextCnn();
  const PathSpec path(f.model.ZeroBaseline(), f.input, 128);
  for (auto _ : state) benchmark::DoNotOptimize(IntegratedGradients(f.model.graph, path));
}
BENCHMARK(BM_IntegratedGradients);

}  // namespace
}  // namespace conductance

BENCHMARK_MAIN();
