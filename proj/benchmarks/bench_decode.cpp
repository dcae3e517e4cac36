#include <benchmark/benchmark.h>

#include "bench_common.hpp"

static void BM_Expand(benchmark::State& state) {
  const auto s = bench::make_setup(static_cast<std::size_t>(state.range(0)));
  const auto sub = dog::init_subgraph(s.graph, s.query);
  const auto chosen = s.graph->at(sub.indices().front());
  for (auto _ : state) benchmark::DoNotOptimize(dog::expand(sub, chosen));
}
BENCHMARK(BM_Expand)->Arg(120)->Arg(1000);

static void BM_DogDecode(benchmark::State& state) {
  const auto s = bench::make_setup(120);
  const auto& v = s.tokenizer->vocab();
  dog::RandomScorer scorer(v.size(), 7, 3.0, {{v.t_bos_id(), 3.0}});
  dog::DecodeConfig cfg;
  cfg.beam_size = static_cast<std::size_t>(state.range(0));
  cfg.max_steps = 4;
  cfg.max_unconstrained_tokens = 16;
  cfg.parallel = state.range(1) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(dog::dog_decode(scorer, s.prompt, s.graph, s.query, *s.tokenizer, cfg));
}
BENCHMARK(BM_DogDecode)->Args({1, 0})->Args({3, 0})->Args({3, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
