#include <benchmark/benchmark.h>

#include <random>

#include "ideation/docproc/document.hpp"
#include "ideation/docproc/tokenizer.hpp"
#include "words.hpp"

namespace {

void BM_SplitToFit(benchmark::State& state) {
    std::mt19937 rng(3);
    const auto paragraph = bench::random_text(rng, 2000);
    const auto tokenizer = ideation::docproc::make_tokenizer("whitespace");
    const auto budget = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ideation::docproc::split_to_fit(paragraph, budget, *tokenizer));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(paragraph.size()));
}
BENCHMARK(BM_SplitToFit)->Arg(8)->Arg(512);

}  // namespace
