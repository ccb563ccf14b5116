#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "mhagent/evalbench/classification.hpp"
#include "mhagent/evalbench/metrics.hpp"

using namespace mhagent;

static void BM_AutoScores(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const std::string cand = bench::random_text(rng, static_cast<int>(state.range(0)));
    const std::string ref = bench::random_text(rng, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(evalbench::auto_scores(cand, ref));
}
BENCHMARK(BM_AutoScores)->Arg(20)->Arg(100)->Arg(400);

static void BM_RougeL(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const auto a = evalbench::char_tokenize(bench::random_text(rng, static_cast<int>(state.range(0))));
    const auto b = evalbench::char_tokenize(bench::random_text(rng, static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(evalbench::rouge_l(a, b));
}
BENCHMARK(BM_RougeL)->Arg(50)->Arg(500);

static void BM_WeightedF1(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> cls(0, 3);
    std::vector<SeverityLevel> t, p;
    for (int i = 0; i < state.range(0); ++i) {
        t.emplace_back(cls(rng));
        p.emplace_back(cls(rng));
    }
    for (auto _ : state) {
        const auto cm = evalbench::confusion(t, p);
        benchmark::DoNotOptimize(evalbench::weighted_metric(cm, evalbench::MetricKind::f1));
    }
}
BENCHMARK(BM_WeightedF1)->Arg(1000)->Arg(6046);
