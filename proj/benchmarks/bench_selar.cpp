// Microbenchmarks for the hot paths: chain composition, encoder forward,
// full backward, and the cross-validated outer update.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "selar/encoder.hpp"
#include "selar/labels.hpp"
#include "selar/metapath.hpp"
#include "selar/params.hpp"
#include "selar/rng.hpp"
#include "selar/synth.hpp"
#include "selar/tape.hpp"
#include "selar/trainer.hpp"

namespace {

using namespace selar;

SynthDataset make_dataset(int64_t n_per_type) {
  SynthConfig sc;
  sc.n_per_type = n_per_type;
  sc.seed = 1;
  return synth_hetero(sc);
}

DataBundle make_bundle(const SynthDataset& ds) {
  DataBundle b;
  b.graph = ds.graph;
  b.primary.pairs = ds.primary.pairs;
  int32_t task = 1;
  for (const MetaPathSpec& spec : enumerate_composable_specs(ds.graph, 2, 2)) {
    const SparseBool composed = compose_adjacency(ds.graph, spec);
    const int64_t nnz = composed.nnz();
    const int64_t zeros = composed.rows() * composed.cols() - nnz - composed.rows();
    if (nnz < 20 || zeros < 20) continue;
    AuxTask aux;
    aux.labels = build_pair_labels(composed, std::min<int64_t>(200, nnz),
                                   std::min<int64_t>(200, zeros), 7, task++);
    b.aux.push_back(std::move(aux));
  }
  return b;
}

void BM_ComposeChain(benchmark::State& state) {
  const SynthDataset ds = make_dataset(state.range(0));
  const MetaPathSpec spec{{0, 1, 2}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(compose_adjacency(ds.graph, spec));
  }
}
BENCHMARK(BM_ComposeChain)->Arg(100)->Arg(300);

void BM_EncoderForward(benchmark::State& state) {
  const SynthDataset ds = make_dataset(state.range(0));
  const Encoder enc(ds.graph, EncoderConfig{});
  ParamStore params;
  std::mt19937_64 rng = substream(1, "bench.init");
  enc.init_params(params, rng);
  for (auto _ : state) {
    Tape t;
    VarMap m = bind_params(t, params, /*requires_grad=*/false);
    benchmark::DoNotOptimize(enc.encode(t, m).value());
  }
}
BENCHMARK(BM_EncoderForward)->Arg(100)->Arg(300);

void BM_EncoderBackward(benchmark::State& state) {
  const SynthDataset ds = make_dataset(state.range(0));
  const Encoder enc(ds.graph, EncoderConfig{});
  ParamStore params;
  std::mt19937_64 rng = substream(1, "bench.init");
  enc.init_params(params, rng);
  for (auto _ : state) {
    Tape t;
    VarMap m = bind_params(t, params, /*requires_grad=*/true);
    Var loss = t.sum(enc.encode(t, m));
    benchmark::DoNotOptimize(grads_by_name(t, loss, m));
  }
}
BENCHMARK(BM_EncoderBackward)->Arg(100)->Arg(300);

void BM_MetaStep(benchmark::State& state) {
  const SynthDataset ds = make_dataset(100);
  const DataBundle bundle = make_bundle(ds);
  TrainConfig cfg;
  cfg.strategy = StrategyKind::Selar;
  cfg.folds = static_cast<int32_t>(state.range(0));
  Trainer tr(bundle, EncoderConfig{}, cfg);
  const Trainer::Batch batch = tr.sample_batch();
  for (auto _ : state) {
    tr.meta_step(batch);
  }
}
BENCHMARK(BM_MetaStep)->Arg(1)->Arg(3);

void BM_ModelStep(benchmark::State& state) {
  const SynthDataset ds = make_dataset(100);
  const DataBundle bundle = make_bundle(ds);
  TrainConfig cfg;
  cfg.strategy = StrategyKind::Selar;
  Trainer tr(bundle, EncoderConfig{}, cfg);
  const Trainer::Batch batch = tr.sample_batch();
  for (auto _ : state) {
    benchmark::DoNotOptimize(tr.model_step(batch));
  }
}
BENCHMARK(BM_ModelStep);

}  // namespace

BENCHMARK_MAIN();
