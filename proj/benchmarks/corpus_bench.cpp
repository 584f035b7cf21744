#include <benchmark/benchmark.h>

#include <random>

#include "ideation/corpus/corpus_index.hpp"
#include "ideation/service/hash_embedding.hpp"
#include "words.hpp"

namespace {

using ideation::corpus::CorpusIndex;
using ideation::corpus::PaperRecord;

std::vector<PaperRecord> make_corpus(std::size_t n) {
    std::mt19937 rng(7);
    std::vector<PaperRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({"p" + std::to_string(i), bench::random_text(rng, 10), bench::random_text(rng, 120), {}, {}, {}});
    return out;
}

void BM_Ingest(benchmark::State& state) {
    const auto docs = make_corpus(static_cast<std::size_t>(state.range(0)));
    ideation::service::HashEmbeddingProvider emb;
    for (auto _ : state) {
        CorpusIndex idx;
        benchmark::DoNotOptimize(idx.ingest(docs, emb));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ingest)->Arg(100)->Arg(1000);

void BM_RetrieveTopK(benchmark::State& state) {
    const auto docs = make_corpus(static_cast<std::size_t>(state.range(0)));
    ideation::service::HashEmbeddingProvider emb;
    CorpusIndex idx;
    idx.ingest(docs, emb);
    std::mt19937 rng(11);
    const auto query = bench::random_text(rng, 30);
    for (auto _ : state) benchmark::DoNotOptimize(idx.retrieve_topk(query, 50, emb));
}
BENCHMARK(BM_RetrieveTopK)->Arg(1000)->Arg(10000);

}  // namespace
