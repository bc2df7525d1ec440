#include <benchmark/benchmark.h>

#include "coordlab/hybrid.hpp"

using namespace coordlab;

namespace {

JointPmf four_tuple_joint() {
  auto [t, w] = make_binary_example(0.4, 0.1, 0.2);
  return t.joint;
}

void BM_entropy(benchmark::State& state) {
  const JointPmf j = four_tuple_joint();
  for (auto _ : state) benchmark::DoNotOptimize(entropy(j));
}
BENCHMARK(BM_entropy);

void BM_mutual_information(benchmark::State& state) {
  const JointPmf j = four_tuple_joint();
  for (auto _ : state)
    benchmark::DoNotOptimize(mutual_information(j, {kAxisS, kAxisX}, {kAxisY, kAxisShat}));
}
BENCHMARK(BM_mutual_information);

void BM_total_variation(benchmark::State& state) {
  auto [ta, wa] = make_binary_example(0.4, 0.1, 0.2);
  auto [tb, wb] = make_binary_example(0.4, 0.1, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(total_variation(ta.joint, tb.joint));
}
BENCHMARK(BM_total_variation);

void BM_compose_witness(benchmark::State& state) {
  auto [t, w] = make_binary_example(0.4, 0.1, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(witness_joint(t, w));
}
BENCHMARK(BM_compose_witness);

void BM_empirical_joint(benchmark::State& state) {
  auto [t, w] = make_binary_example(0.4, 0.1, 0.2);
  Rng rng(1);
  const size_t n = static_cast<size_t>(state.range(0));
  const SequenceBlock s = sample_iid(t.source, n, rng);
  const SequenceBlock x = s.renamed(kAxisX);
  const std::vector<SequenceBlock> blocks{s, x};
  for (auto _ : state) benchmark::DoNotOptimize(empirical_joint(blocks));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_empirical_joint)->Arg(1000)->Arg(100000);

void BM_hybrid_decode_scan(benchmark::State& state) {
  auto [t, w] = make_binary_example(0.5, 0.1, 0.44);
  HybridBuildOptions opt;
  opt.rate_margin = 0.004;
  Rng rng(7);
  const size_t n = 900;
  HybridCode code = build_hybrid(t, w, n, opt, rng);
  Rng trng(8);
  const SequenceBlock s = sample_iid(t.source, n, trng);
  const HybridEncodeResult enc = hybrid_encode(code, s, trng);
  const std::vector<SequenceBlock> chan_in{enc.x};
  const SequenceBlock y = sample_through(t.channel, chan_in, trng);
  for (auto _ : state) benchmark::DoNotOptimize(hybrid_decode(code, y));
  state.SetItemsProcessed(state.iterations() * code.codewords.count() * n);
}
BENCHMARK(BM_hybrid_decode_scan);

void BM_noncausal_search(benchmark::State& state) {
  auto [t, w] = make_binary_example(0.4, 0.1, 0.2);
  for (auto _ : state) {
    SearchConfig cfg;
    cfg.starts = 4;
    cfg.seed = 11;
    benchmark::DoNotOptimize(check_noncausal_inner(t, 2, cfg));
  }
}
BENCHMARK(BM_noncausal_search)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
