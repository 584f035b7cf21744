#include <benchmark/benchmark.h>

#include <string>

#include "ideation/agents/parsers.hpp"

namespace {

void BM_ParseBinary(benchmark::State& state) {
    const std::string raw = "Yes. The second paragraph reports the same failure mode in a larger study.";
    for (auto _ : state) benchmark::DoNotOptimize(ideation::agents::parse_binary_answer(raw));
}
BENCHMARK(BM_ParseBinary);

void BM_ParseBullets(benchmark::State& state) {
    std::string raw = "Here are the gaps:\n";
    for (int i = 1; i <= 20; ++i)
        raw += std::to_string(i) + ". item number " + std::to_string(i) + " with some words\n   and a wrapped line\n";
    for (auto _ : state) benchmark::DoNotOptimize(ideation::agents::parse_bullets(raw));
}
BENCHMARK(BM_ParseBullets);

}  // namespace
