#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "mhagent/backend/scripted_backend.hpp"
#include "mhagent/domain/profile.hpp"
#include "mhagent/orchestrator/agent.hpp"

using namespace mhagent;

static void BM_AssemblePrompt(benchmark::State& state) {
    std::mt19937_64 rng(6);
    auto echo = std::make_shared<backend::ScriptedBackend>(
        [](std::span<const backend::ChatMessage> m) { return std::string(backend::last_user_content(m)); });
    orchestrator::Orchestrator o(echo, echo);
    auto session = o.new_session(make_profile("bench"));
    for (int t = 0; t < state.range(0); ++t) session.history.push_back({bench::random_text(rng, 20), bench::random_text(rng, 30)});
    const std::string text = bench::random_text(rng, 20);
    for (auto _ : state) benchmark::DoNotOptimize(o.assemble_prompt(session, text));
}
BENCHMARK(BM_AssemblePrompt)->Arg(5)->Arg(50);
