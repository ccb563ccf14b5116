#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "mhagent/datapipe/dedup.hpp"
#include "mhagent/datapipe/minhash.hpp"

using namespace mhagent;

static void BM_Signature(benchmark::State& state) {
    std::mt19937_64 rng(4);
    const auto shingles = datapipe::shingle(bench::random_text(rng, static_cast<int>(state.range(0))));
    const datapipe::MinHasher hasher;
    for (auto _ : state) benchmark::DoNotOptimize(hasher.signature(shingles));
}
BENCHMARK(BM_Signature)->Arg(40)->Arg(200);

static void BM_LshDedup(benchmark::State& state) {
    std::mt19937_64 rng(5);
    std::vector<std::string> docs;
    for (int i = 0; i < state.range(0); ++i) docs.push_back(bench::random_text(rng, 40));
    const datapipe::LshConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(datapipe::lsh_dedup_texts(docs, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LshDedup)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
