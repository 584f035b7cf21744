#include "ideation/docproc/user_corpus.hpp"

#include <algorithm>
#include <mutex>
#include <ostream>

#include "ideation/error.hpp"

namespace ideation::docproc {

UserCorpus::UserCorpus(std::string session_id, ChunkingOptions options)
    : session_id_(std::move(session_id)), options_(std::move(options)) {
    if (!options_.tokenizer) options_.tokenizer = std::make_shared<WhitespaceTokenizer>();
    if (options_.max_tokens == 0) fail(ErrorCode::InvalidArgument, "max_tokens must be >= 1");
}

void UserCorpus::accept_paper(const std::string& paper_id) {
    std::unique_lock lock(mutex_);
    accepted_.insert(paper_id);
}

bool UserCorpus::is_accepted(std::string_view paper_id) const {
    std::shared_lock lock(mutex_);
    return accepted_.contains(paper_id);
}

std::size_t UserCorpus::index_chunks(const DocumentText& doc, corpus::EmbeddingProvider& provider) {
    {
        std::shared_lock lock(mutex_);
        if (!accepted_.contains(doc.paper_id))
            fail(ErrorCode::PreconditionFailed,
                 "paper '" + doc.paper_id + "' is not accepted in session " + session_id_);
        if (auto it = by_paper_.find(doc.paper_id); it != by_paper_.end()) return it->second.size();
    }
    auto chunks = chunk_document(doc, options_.max_tokens, *options_.tokenizer);
    std::vector<corpus::EmbeddingInput> inputs;
    inputs.reserve(chunks.size());
    for (const auto& c : chunks) inputs.push_back({c.text, ""});
    auto vectors = corpus::embed_checked(provider, inputs);

    std::vector<StoredChunk> stored;
    stored.reserve(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i)
        stored.push_back({std::move(chunks[i]), std::move(vectors[i])});

    std::unique_lock lock(mutex_);
    auto [it, inserted] = by_paper_.emplace(doc.paper_id, std::move(stored));
    return it->second.size();
}

bool UserCorpus::is_indexed(std::string_view paper_id) const {
    std::shared_lock lock(mutex_);
    return by_paper_.find(paper_id) != by_paper_.end();
}

std::vector<ScoredChunk> UserCorpus::retrieve_chunks(std::string_view paper_id,
                                                     std::string_view query, std::size_t k_small,
                                                     corpus::EmbeddingProvider& provider) const {
    if (k_small == 0) fail(ErrorCode::InvalidArgument, "k_small must be >= 1");
    {
        std::shared_lock lock(mutex_);
        if (by_paper_.find(paper_id) == by_paper_.end())
            fail(ErrorCode::NotFound, "paper '" + std::string(paper_id) + "' is not indexed in session " +
                                          session_id_);
    }
    const corpus::EmbeddingInput input{std::string(query), ""};
    auto qv = corpus::embed_checked(provider, std::span(&input, 1)).front();

    std::shared_lock lock(mutex_);
    const auto& stored = by_paper_.find(paper_id)->second;
    std::vector<ScoredChunk> scored;
    scored.reserve(stored.size());
    for (const auto& s : stored) scored.push_back({s.chunk, corpus::cosine(qv, s.vector)});
    const auto take = std::min(k_small, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                      [](const ScoredChunk& a, const ScoredChunk& b) {
                          if (a.score != b.score) return a.score > b.score;
                          return a.chunk.chunk_id < b.chunk.chunk_id;
                      });
    scored.resize(take);
    return scored;
}

std::vector<Chunk> UserCorpus::chunks_of(std::string_view paper_id) const {
    std::shared_lock lock(mutex_);
    std::vector<Chunk> out;
    if (auto it = by_paper_.find(paper_id); it != by_paper_.end())
        for (const auto& s : it->second) out.push_back(s.chunk);
    return out;
}

std::size_t UserCorpus::chunk_count() const {
    std::shared_lock lock(mutex_);
    std::size_t n = 0;
    for (const auto& [_, v] : by_paper_) n += v.size();
    return n;
}

std::unique_ptr<UserCorpus> UserCorpus::clone(std::string new_session_id) const {
    auto copy = std::make_unique<UserCorpus>(std::move(new_session_id), options_);
    std::shared_lock lock(mutex_);
    copy->accepted_ = accepted_;
    copy->by_paper_ = by_paper_;
    return copy;
}

void UserCorpus::write_dump(std::ostream& out) const {
    std::shared_lock lock(mutex_);
    for (const auto& [_, chunks] : by_paper_)
        for (const auto& s : chunks) out << nlohmann::json(s.chunk).dump() << '\n';
}

}  // namespace ideation::docproc
