#include <benchmark/benchmark.h>

#include "mdelta/bounds.hpp"
#include "mdelta/codec.hpp"
#include "mdelta/coders.hpp"
#include "mdelta/lemma_lab.hpp"
#include "mdelta/source_model.hpp"

using namespace mdelta;

namespace {

Bits fixture_sequence(int ell, std::size_t n) {
  return sample(gen_continuity(std::max(ell, 1), DeltaSpec::exp(1), 1), Past::zeros(20), n, 2);
}

void BM_KtLog2Prob(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  const Bits x = fixture_sequence(ell, 1 << 16);
  KtCoder kt(ell, Past::zeros(20));
  for (auto _ : state) benchmark::DoNotOptimize(log2_prob(kt, x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_KtLog2Prob)->Arg(0)->Arg(4)->Arg(12);

void BM_Encode(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  const Bits x = fixture_sequence(ell, 1 << 16);
  MixtureCoder coder(ell, Past::zeros(20), x.size());
  for (auto _ : state) benchmark::DoNotOptimize(encode(coder, x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_Encode)->Arg(2)->Arg(8);

void BM_Decode(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  const Bits x = fixture_sequence(ell, 1 << 16);
  KtCoder coder(ell, Past::zeros(20));
  const Bits code = encode(coder, x);
  for (auto _ : state) benchmark::DoNotOptimize(decode(coder, code, x.size()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_Decode)->Arg(2)->Arg(8);

void BM_Shtarkov(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(shtarkov_oracle(2, Past::zeros(2), n).log2_sum);
}
BENCHMARK(BM_Shtarkov)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Stationary(benchmark::State& state) {
  const auto src = gen_continuity(static_cast<int>(state.range(0)), DeltaSpec::exp(1), 3);
  for (auto _ : state) benchmark::DoNotOptimize(stationary(src).residual);
}
BENCHMARK(BM_Stationary)->Arg(4)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_CountTable(benchmark::State& state) {
  const Bits x = fixture_sequence(4, 1 << 18);
  for (auto _ : state) benchmark::DoNotOptimize(count_table(x, Past::zeros(20), static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_CountTable)->Arg(2)->Arg(10);

void BM_BoundScan(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(bounds::optimal_ell(std::ldexp(1.0, 20), DeltaSpec::exp(1), bounds::Regime::Refined));
  }
}
BENCHMARK(BM_BoundScan);

void BM_AzumaTrials(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        lab::verify_azuma_stopped(100, 5, 10000, 1, lab::StoppingRule::FirstPassage).failures);
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_AzumaTrials)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
