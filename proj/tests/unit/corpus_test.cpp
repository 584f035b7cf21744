#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "cases.hpp"
#include "ideation/corpus/corpus_file.hpp"
#include "ideation/corpus/corpus_index.hpp"
#include "ideation/error.hpp"
#include "ideation/service/hash_embedding.hpp"

using namespace ideation;
using corpus::PaperRecord;

namespace {

PaperRecord rec(std::string id, std::string title, std::string abs = "") {
    PaperRecord r;
    r.paper_id = std::move(id);
    r.title = std::move(title);
    r.abstract = std::move(abs);
    return r;
}

class FailingEmbedder : public corpus::EmbeddingProvider {
public:
    std::string model_id() const override { return "hash-fnv1a-d256"; }
    std::size_t dimension() const override { return 256; }
    std::vector<std::vector<float>> embed(std::span<const corpus::EmbeddingInput>) override {
        fail(ErrorCode::ProviderUnreachable, "embedding service down");
    }
};

class WrongShapeEmbedder : public corpus::EmbeddingProvider {
public:
    std::string model_id() const override { return "shape"; }
    std::size_t dimension() const override { return 4; }
    std::vector<std::vector<float>> embed(std::span<const corpus::EmbeddingInput> in) override {
        return std::vector<std::vector<float>>(in.size(), std::vector<float>(3, 1.0f));
    }
};

}  // namespace

TEST(CorpusIndex, IngestSkipsDuplicatesAndInvalidRecords) {
    service::HashEmbeddingProvider emb;
    corpus::CorpusIndex idx;
    std::vector<PaperRecord> batch = {rec("p1", "Graph neural networks"), rec("p2", "Protein folding"),
                                      rec("p1", "Duplicate id"), rec("", "No id"), rec("p3", "")};
    auto report = idx.ingest(batch, emb);
    EXPECT_EQ(report.count, 2u);
    EXPECT_EQ(report.skipped, 3u);
    ASSERT_EQ(report.details.size(), 3u);
    EXPECT_EQ(report.details[0].position, 2u);
    EXPECT_EQ(report.details[0].paper_id, "p1");
    EXPECT_EQ(idx.size(), 2u);

    // Re-ingesting an existing id is skipped, never overwritten.
    auto again = idx.ingest(std::vector{rec("p2", "Changed title")}, emb);
    EXPECT_EQ(again.count, 0u);
    EXPECT_EQ(idx.lookup("p2").title, "Protein folding");
}

TEST(CorpusIndex, ProviderFailureIndexesNothing) {
    FailingEmbedder bad;
    corpus::CorpusIndex idx;
    try {
        idx.ingest(std::vector{rec("p1", "A"), rec("p2", "B")}, bad);
        FAIL() << "expected a provider error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ProviderUnreachable);
    }
    EXPECT_TRUE(idx.empty());
}

TEST(CorpusIndex, EmbeddingBatchContractIsChecked) {
    WrongShapeEmbedder bad;
    corpus::CorpusIndex idx;
    EXPECT_THROW(idx.ingest(std::vector{rec("p1", "A")}, bad), Error);
    EXPECT_TRUE(idx.empty());
}

TEST(CorpusIndex, TopKOrderingAndBounds) {
    service::HashEmbeddingProvider emb;
    corpus::CorpusIndex idx;
    idx.ingest(std::vector{rec("b", "retrieval augmented generation"), rec("a", "retrieval augmented generation"),
                           rec("c", "coral reef monitoring"), rec("d", "retrieval of documents")},
               emb);
    auto hits = idx.retrieve_topk("retrieval augmented generation", 10, emb);
    ASSERT_EQ(hits.size(), 4u);  // min(k, size)
    EXPECT_EQ(hits[0].paper_id, "a");  // tie broken by id
    EXPECT_EQ(hits[1].paper_id, "b");
    EXPECT_NEAR(hits[0].score, 1.0, 1e-6);
    for (std::size_t i = 0; i < hits.size(); ++i) {
        EXPECT_EQ(hits[i].rank, i + 1);
        if (i) EXPECT_GE(hits[i - 1].score, hits[i].score);
        EXPECT_LE(hits[i].score, 1.0);
        EXPECT_GE(hits[i].score, -1.0);
    }
    EXPECT_EQ(idx.retrieve_topk("anything", 2, emb).size(), 2u);
    try {
        idx.retrieve_topk("x", 0, emb);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    }
}

TEST(CorpusIndex, EmptyCorpusAndUnknownIds) {
    service::HashEmbeddingProvider emb;
    corpus::CorpusIndex idx;
    EXPECT_TRUE(idx.retrieve_topk("query", 5, emb).empty());
    try {
        idx.lookup("nope");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotFound);
    }
}

TEST(CorpusIndex, RejectsQueriesFromAnotherModel) {
    service::HashEmbeddingProvider emb(256), other(128);
    corpus::CorpusIndex idx;
    idx.ingest(std::vector{rec("p1", "A paper")}, emb);
    EXPECT_THROW(idx.retrieve_topk("paper", 1, other), Error);
    EXPECT_THROW(idx.ingest(std::vector{rec("p2", "Another")}, other), Error);
}

TEST(CorpusIndex, SnapshotRoundTripPreservesRetrieval) {
    service::HashEmbeddingProvider emb;
    corpus::CorpusIndex idx;
    auto docs = support::random_corpus(60, 7);
    idx.ingest(docs, emb);
    std::stringstream snap;
    idx.save_snapshot(snap);
    corpus::CorpusIndex restored;
    auto report = restored.load_snapshot(snap);
    EXPECT_EQ(report.count, 60u);
    EXPECT_EQ(restored.model_id(), idx.model_id());
    for (const auto& q : support::random_queries(5, 9))
        EXPECT_EQ(restored.retrieve_topk(q, 10, emb), idx.retrieve_topk(q, 10, emb));
    EXPECT_EQ(restored.lookup(docs[3].paper_id), docs[3]);
}

TEST(CorpusIndex, JsonlSkipsBadLines) {
    service::HashEmbeddingProvider emb;
    corpus::CorpusIndex idx;
    std::istringstream in(
        "{\"paper_id\":\"p1\",\"title\":\"One\",\"abstract\":\"a\"}\n"
        "not json\n"
        "\n"
        "{\"paper_id\":\"p2\",\"title\":3}\n"
        "{\"paper_id\":\"p3\",\"title\":\"Three\",\"abstract\":\"c\",\"year\":\"2020\"}\n");
    auto r = idx.ingest_jsonl(in, emb);
    EXPECT_EQ(r.count, 2u);
    EXPECT_EQ(r.skipped, 2u);
    EXPECT_EQ(idx.lookup("p3").year, std::optional<std::string>("2020"));
}

TEST(CorpusIndex, OpenCorpusDetectsSnapshotsAndSetsBaseDir) {
    support::TempDir dir;
    service::HashEmbeddingProvider emb;
    auto docs = support::random_corpus(5, 1);
    support::write_corpus(dir / "c.jsonl", docs);
    auto loaded = corpus::open_corpus(dir / "c.jsonl", emb);
    EXPECT_EQ(loaded.report.count, 5u);
    EXPECT_EQ(loaded.index->base_dir(), dir.path());
    {
        std::ofstream out(dir / "c.snapshot");
        loaded.index->save_snapshot(out);
    }
    auto snap = corpus::open_corpus(dir / "c.snapshot", emb);
    EXPECT_EQ(snap.index->size(), 5u);
    EXPECT_THROW(corpus::open_corpus(dir / "missing.jsonl", emb), Error);
}

TEST(CorpusIndex, ConcurrentReadsAgree) {
    service::HashEmbeddingProvider emb;
    corpus::CorpusIndex idx;
    idx.ingest(support::random_corpus(200, 3), emb);
    auto expected = idx.retrieve_topk("kazox velmir", 20, emb);
    std::vector<std::jthread> readers;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 4; ++t)
        readers.emplace_back([&] {
            for (int i = 0; i < 20; ++i)
                if (idx.retrieve_topk("kazox velmir", 20, emb) != expected) ++mismatches;
        });
    readers.clear();
    EXPECT_EQ(mismatches.load(), 0);
}

TEST(Embedding, CosineAndNorm) {
    std::vector<float> a{1, 0, 0}, b{0, 1, 0}, c{2, 0, 0}, z{0, 0, 0};
    EXPECT_DOUBLE_EQ(corpus::cosine(a, b), 0.0);
    EXPECT_DOUBLE_EQ(corpus::cosine(a, c), 1.0);
    EXPECT_DOUBLE_EQ(corpus::cosine(a, z), 0.0);
    EXPECT_DOUBLE_EQ(corpus::l2_norm(c), 2.0);
}
