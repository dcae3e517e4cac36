#include <benchmark/benchmark.h>

#include "bench_common.hpp"

static void BM_BuildTrie(benchmark::State& state) {
  const auto s = bench::make_setup(static_cast<std::size_t>(state.range(0)));
  const auto& ts = s.graph->triplets();
  for (auto _ : state) benchmark::DoNotOptimize(dog::build_trie(ts, *s.tokenizer));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(ts.size()));
}
BENCHMARK(BM_BuildTrie)->Arg(30)->Arg(120)->Arg(500);

static void BM_FindValidTokens(benchmark::State& state) {
  const auto s = bench::make_setup(static_cast<std::size_t>(state.range(0)));
  const auto trie = dog::build_trie(s.graph->triplets(), *s.tokenizer);
  std::vector<dog::TokenSeq> prefixes;
  for (const auto& t : s.graph->triplets()) {
    auto seq = dog::serialize_triplet(*s.tokenizer, t);
    seq.resize(seq.size() / 2 + 1);
    prefixes.push_back(std::move(seq));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dog::find_valid_tokens(trie, prefixes[i]));
    i = (i + 1) % prefixes.size();
  }
}
BENCHMARK(BM_FindValidTokens)->Arg(120)->Arg(500);

static void BM_MaskLogits(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> logits(n);
  for (std::size_t i = 0; i < n; ++i) logits[i] = static_cast<double>(i % 17) * 0.25;
  dog::ValidSet valid;
  for (std::size_t i = 0; i < n; i += 97) valid.push_back(static_cast<dog::TokenId>(i));
  for (auto _ : state) benchmark::DoNotOptimize(dog::log_softmax(dog::mask_logits(logits, valid)));
}
BENCHMARK(BM_MaskLogits)->Arg(32000)->Arg(128000);

BENCHMARK_MAIN();
