// Microbenchmarks for the hot paths of the pipeline.

#include <benchmark/benchmark.h>

#include "imlg/graph.hpp"
#include "imlg/metrics.hpp"
#include "imlg/model.hpp"
#include "imlg/partition.hpp"
#include "imlg/synthetic.hpp"

namespace {

using namespace imlg;

TargetedDesign make_design(int n) {
  GenConfig cfg;
  cfg.n_instances = n;
  cfg.seed = 42;
  return generate_targeted(cfg);
}

void BM_BuildGraph(benchmark::State& state) {
  const TargetedDesign t = make_design(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(t.generated.design, &t.labels, BuildConfig{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildGraph)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Partition(benchmark::State& state) {
  const TargetedDesign t = make_design(static_cast<int>(state.range(0)));
  const CircuitGraph g = build_graph(t.generated.design, &t.labels, BuildConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(partition_graph(g, 500, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Partition)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  const TargetedDesign t = make_design(5000);
  const CircuitGraph g = build_graph(t.generated.design, &t.labels, BuildConfig{});
  const Partition part = partition_graph(g, static_cast<std::size_t>(state.range(0)), 1);
  const CircuitGraph sub = induced_subgraph(g, part.clusters().front());
  const Batch b{sub.adj, sub.features, sub.labels};
  const Model m = init_model(static_cast<int>(g.feature_dim()), HyperParams{}, 1);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(forward_backward(m, b, rng));
}
BENCHMARK(BM_TrainStep)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Roc(benchmark::State& state) {
  Rng rng(7);
  ScoredSet s;
  for (long i = 0; i < state.range(0); ++i) {
    s.labels.push_back(rng.uniform() < 0.1 ? 1 : 0);
    s.scores.push_back(rng.uniform());
  }
  for (auto _ : state) benchmark::DoNotOptimize(report(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Roc)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
