#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ideation/corpus/embedding.hpp"
#include "ideation/corpus/paper.hpp"

namespace ideation::corpus {

struct SkippedRecord {
    std::size_t position = 0;  // 0-based record or line number
    std::string paper_id;      // empty when the record had no usable id
    std::string reason;
};

struct IngestReport {
    std::size_t count = 0;
    std::size_t skipped = 0;
    std::vector<SkippedRecord> details;
};

void to_json(nlohmann::json& j, const IngestReport& r);

/// Global corpus with document-level embeddings and exact cosine top-K.
///
/// Reads take a shared lock and may run concurrently; ingestion is
/// single-writer and excludes reads. Embeddings are keyed to the model id of
/// the first provider used for ingestion; retrieval with a different model is
/// rejected.
class CorpusIndex {
public:
    CorpusIndex() = default;
    CorpusIndex(const CorpusIndex& other);
    CorpusIndex& operator=(const CorpusIndex&) = delete;

    /// Embeds and indexes every valid, not-yet-present record. Duplicate ids
    /// and records with an empty id or title are skipped and reported, never
    /// aborting the batch. A provider failure aborts without indexing anything.
    IngestReport ingest(std::span<const PaperRecord> records, EmbeddingProvider& provider);

    /// JSON-lines corpus reader; unparseable lines count as skipped.
    IngestReport ingest_jsonl(std::istream& in, EmbeddingProvider& provider);

    /// min(k, size()) hits ordered by score descending, ties by ascending
    /// paper_id. Throws InvalidArgument for k == 0.
    std::vector<RetrievalHit> retrieve_topk(std::string_view query_text, std::size_t k,
                                            EmbeddingProvider& provider) const;

    std::vector<RetrievalHit> retrieve_by_vector(std::span<const float> query,
                                                 std::size_t k) const;

    /// Throws NotFound for unknown ids (including on an empty corpus).
    PaperRecord lookup(std::string_view paper_id) const;
    bool contains(std::string_view paper_id) const;

    std::size_t size() const;
    bool empty() const { return size() == 0; }
    std::string model_id() const;

    /// Snapshot of every embedding, in ingestion order.
    std::vector<DocEmbedding> embeddings() const;

    /// Records plus vectors as JSON lines; `load_snapshot` restores them
    /// without re-embedding.
    void save_snapshot(std::ostream& out) const;
    IngestReport load_snapshot(std::istream& in);

    void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }
    const std::filesystem::path& base_dir() const noexcept { return base_dir_; }

private:
    struct Entry {
        PaperRecord record;
        std::vector<float> vector;
        double norm = 0.0;
    };

    std::vector<RetrievalHit> scan(std::span<const float> query, std::size_t k) const;
    void insert_locked(PaperRecord record, std::vector<float> vector);

    mutable std::shared_mutex mutex_;
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::string model_id_;
    std::size_t dimension_ = 0;
    std::filesystem::path base_dir_;
};

/// Query text for a (title, abstract) proposal: title, newline, abstract.
std::string query_text(std::string_view title, std::string_view abstract);

}  // namespace ideation::corpus
