#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "ideation/corpus/embedding.hpp"
#include "ideation/docproc/document.hpp"
#include "ideation/docproc/tokenizer.hpp"

namespace ideation::docproc {

struct ChunkingOptions {
    std::size_t max_tokens = 512;
    std::shared_ptr<const Tokenizer> tokenizer = std::make_shared<WhitespaceTokenizer>();
};

struct ScoredChunk {
    Chunk chunk;
    double score = 0.0;
};

/// Per-session chunk store: the shared memory the agents read from during
/// stage-2 retrieval. Only papers accepted into the session may be indexed.
class UserCorpus {
public:
    explicit UserCorpus(std::string session_id, ChunkingOptions options = {});

    const std::string& session_id() const noexcept { return session_id_; }
    const ChunkingOptions& options() const noexcept { return options_; }

    void accept_paper(const std::string& paper_id);
    bool is_accepted(std::string_view paper_id) const;

    /// Chunks, embeds and stores `doc`. Idempotent per paper: a second call
    /// returns the existing count. All-or-nothing: if embedding fails nothing
    /// for this paper is stored. Throws PreconditionFailed for unaccepted papers.
    std::size_t index_chunks(const DocumentText& doc, corpus::EmbeddingProvider& provider);

    bool is_indexed(std::string_view paper_id) const;

    /// Top-k_small chunks of one paper by cosine to `query`, ties by chunk_id.
    /// Throws NotFound if the paper is not indexed in this session.
    std::vector<ScoredChunk> retrieve_chunks(std::string_view paper_id, std::string_view query,
                                             std::size_t k_small,
                                             corpus::EmbeddingProvider& provider) const;

    std::vector<Chunk> chunks_of(std::string_view paper_id) const;
    std::size_t chunk_count() const;

    /// Copy under a new session id (for carrying a user corpus forward).
    std::unique_ptr<UserCorpus> clone(std::string new_session_id) const;

    /// JSON lines, one chunk per line, papers in id order.
    void write_dump(std::ostream& out) const;

private:
    struct StoredChunk {
        Chunk chunk;
        std::vector<float> vector;
    };

    std::string session_id_;
    ChunkingOptions options_;
    mutable std::shared_mutex mutex_;
    std::set<std::string, std::less<>> accepted_;
    std::map<std::string, std::vector<StoredChunk>, std::less<>> by_paper_;
};

}  // namespace ideation::docproc
