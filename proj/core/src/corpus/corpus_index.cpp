#include "ideation/corpus/corpus_index.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <unordered_set>

#include "ideation/error.hpp"
#include "ideation/text.hpp"

namespace ideation::corpus {

std::vector<std::vector<float>> embed_checked(EmbeddingProvider& provider,
                                              std::span<const EmbeddingInput> inputs) {
    if (inputs.empty()) return {};
    auto vectors = provider.embed(inputs);
    if (vectors.size() != inputs.size())
        fail(ErrorCode::ProviderRejected,
             "embedding provider returned " + std::to_string(vectors.size()) + " vectors for " +
                 std::to_string(inputs.size()) + " inputs");
    const auto d = provider.dimension();
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != d)
            fail(ErrorCode::ProviderRejected,
                 "embedding for input '" + inputs[i].title + "' has dimension " +
                     std::to_string(vectors[i].size()) + ", expected " + std::to_string(d));
        for (float x : vectors[i])
            if (!std::isfinite(x))
                fail(ErrorCode::ProviderRejected,
                     "embedding for input '" + inputs[i].title + "' has a non-finite component");
    }
    return vectors;
}

DocEmbedding embed_document(std::string_view title, std::string_view abstract,
                            EmbeddingProvider& provider) {
    if (text::trim(title).empty()) fail(ErrorCode::InvalidArgument, "title must be non-empty");
    const EmbeddingInput input{std::string(title), std::string(abstract)};
    auto vectors = embed_checked(provider, std::span(&input, 1));
    return DocEmbedding{"", std::move(vectors.front()), provider.model_id()};
}

double l2_norm(std::span<const float> v) noexcept {
    double s = 0.0;
    for (float x : v) s += static_cast<double>(x) * x;
    return std::sqrt(s);
}

double cosine(std::span<const float> a, std::span<const float> b) noexcept {
    const auto n = std::min(a.size(), b.size());
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += static_cast<double>(a[i]) * b[i];
    const double denom = l2_norm(a) * l2_norm(b);
    if (denom == 0.0) return 0.0;
    return std::clamp(dot / denom, -1.0, 1.0);
}

std::string query_text(std::string_view title, std::string_view abstract) {
    std::string q(title);
    q += '\n';
    q += abstract;
    return q;
}

void to_json(nlohmann::json& j, const IngestReport& r) {
    auto details = nlohmann::json::array();
    for (const auto& s : r.details)
        details.push_back({{"position", s.position}, {"paper_id", s.paper_id}, {"reason", s.reason}});
    j = nlohmann::json{{"count", r.count}, {"skipped", r.skipped}, {"details", details}};
}

CorpusIndex::CorpusIndex(const CorpusIndex& other) {
    std::shared_lock lock(other.mutex_);
    entries_ = other.entries_;
    by_id_ = other.by_id_;
    model_id_ = other.model_id_;
    dimension_ = other.dimension_;
    base_dir_ = other.base_dir_;
}

void CorpusIndex::insert_locked(PaperRecord record, std::vector<float> vector) {
    const double norm = l2_norm(vector);
    by_id_.emplace(record.paper_id, entries_.size());
    entries_.push_back(Entry{std::move(record), std::move(vector), norm});
}

IngestReport CorpusIndex::ingest(std::span<const PaperRecord> records, EmbeddingProvider& provider) {
    IngestReport report;
    std::unique_lock lock(mutex_);
    if (!model_id_.empty() && model_id_ != provider.model_id())
        fail(ErrorCode::InvalidArgument, "corpus is indexed with model '" + model_id_ +
                                             "', provider is '" + provider.model_id() + "'");

    std::vector<std::size_t> accepted;
    std::unordered_set<std::string> batch_ids;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (text::trim(r.paper_id).empty()) {
            report.details.push_back({i, "", "empty paper_id"});
            continue;
        }
        if (text::trim(r.title).empty()) {
            report.details.push_back({i, r.paper_id, "empty title"});
            continue;
        }
        if (by_id_.contains(r.paper_id) || batch_ids.contains(r.paper_id)) {
            report.details.push_back({i, r.paper_id, "duplicate paper_id"});
            continue;
        }
        batch_ids.insert(r.paper_id);
        accepted.push_back(i);
    }

    std::vector<EmbeddingInput> inputs;
    inputs.reserve(accepted.size());
    for (auto i : accepted) inputs.push_back({records[i].title, records[i].abstract});
    auto vectors = embed_checked(provider, inputs);

    if (model_id_.empty() && !accepted.empty()) {
        model_id_ = provider.model_id();
        dimension_ = provider.dimension();
    }
    for (std::size_t n = 0; n < accepted.size(); ++n)
        insert_locked(records[accepted[n]], std::move(vectors[n]));

    report.count = accepted.size();
    report.skipped = report.details.size();
    return report;
}

IngestReport CorpusIndex::ingest_jsonl(std::istream& in, EmbeddingProvider& provider) {
    std::vector<PaperRecord> records;
    std::vector<std::size_t> line_of;
    IngestReport malformed;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        const auto pos = line_no++;
        if (text::trim(line).empty()) continue;
        try {
            records.push_back(nlohmann::json::parse(line).get<PaperRecord>());
            line_of.push_back(pos);
        } catch (const std::exception& e) {
            malformed.details.push_back({pos, "", std::string("malformed record: ") + e.what()});
        }
    }
    auto report = ingest(records, provider);
    // report positions in file line numbers rather than record indices
    for (auto& d : report.details) d.position = line_of[d.position];
    report.details.insert(report.details.end(), malformed.details.begin(), malformed.details.end());
    std::sort(report.details.begin(), report.details.end(),
              [](const auto& a, const auto& b) { return a.position < b.position; });
    report.skipped = report.details.size();
    return report;
}

std::vector<RetrievalHit> CorpusIndex::scan(std::span<const float> query, std::size_t k) const {
    if (k == 0) fail(ErrorCode::InvalidArgument, "k must be >= 1");
    const double qnorm = l2_norm(query);
    std::vector<RetrievalHit> scored;
    scored.reserve(entries_.size());
    for (const auto& e : entries_) {
        double dot = 0.0;
        const auto n = std::min(query.size(), e.vector.size());
        for (std::size_t i = 0; i < n; ++i) dot += static_cast<double>(query[i]) * e.vector[i];
        const double denom = qnorm * e.norm;
        const double score = denom == 0.0 ? 0.0 : std::clamp(dot / denom, -1.0, 1.0);
        scored.push_back({e.record.paper_id, score, 0});
    }
    const auto take = std::min(k, scored.size());
    auto better = [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.paper_id < b.paper_id;
    };
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end(), better);
    scored.resize(take);
    for (std::size_t i = 0; i < scored.size(); ++i) scored[i].rank = i + 1;
    return scored;
}

std::vector<RetrievalHit> CorpusIndex::retrieve_topk(std::string_view query_text, std::size_t k,
                                                     EmbeddingProvider& provider) const {
    if (k == 0) fail(ErrorCode::InvalidArgument, "k must be >= 1");
    {
        std::shared_lock lock(mutex_);
        if (entries_.empty()) return {};
        if (model_id_ != provider.model_id())
            fail(ErrorCode::InvalidArgument, "corpus is indexed with model '" + model_id_ +
                                                 "', provider is '" + provider.model_id() + "'");
    }
    const EmbeddingInput input{std::string(query_text), ""};
    auto vectors = embed_checked(provider, std::span(&input, 1));
    std::shared_lock lock(mutex_);
    return scan(vectors.front(), k);
}

std::vector<RetrievalHit> CorpusIndex::retrieve_by_vector(std::span<const float> query,
                                                          std::size_t k) const {
    std::shared_lock lock(mutex_);
    return scan(query, k);
}

PaperRecord CorpusIndex::lookup(std::string_view paper_id) const {
    std::shared_lock lock(mutex_);
    auto it = by_id_.find(std::string(paper_id));
    if (it == by_id_.end()) fail(ErrorCode::NotFound, "unknown paper_id '" + std::string(paper_id) + "'");
    return entries_[it->second].record;
}

bool CorpusIndex::contains(std::string_view paper_id) const {
    std::shared_lock lock(mutex_);
    return by_id_.contains(std::string(paper_id));
}

std::size_t CorpusIndex::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::string CorpusIndex::model_id() const {
    std::shared_lock lock(mutex_);
    return model_id_;
}

std::vector<DocEmbedding> CorpusIndex::embeddings() const {
    std::shared_lock lock(mutex_);
    std::vector<DocEmbedding> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back({e.record.paper_id, e.vector, model_id_});
    return out;
}

void CorpusIndex::save_snapshot(std::ostream& out) const {
    std::shared_lock lock(mutex_);
    for (const auto& e : entries_) {
        nlohmann::json j = e.record;
        j["model_id"] = model_id_;
        j["vector"] = e.vector;
        out << j.dump() << '\n';
    }
}

IngestReport CorpusIndex::load_snapshot(std::istream& in) {
    IngestReport report;
    std::unique_lock lock(mutex_);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        const auto pos = line_no++;
        if (text::trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            auto record = j.get<PaperRecord>();
            auto model = j.at("model_id").get<std::string>();
            auto vector = j.at("vector").get<std::vector<float>>();
            if (model_id_.empty()) {
                model_id_ = model;
                dimension_ = vector.size();
            }
            if (model != model_id_ || vector.size() != dimension_) {
                report.details.push_back({pos, record.paper_id, "model or dimension mismatch"});
                continue;
            }
            if (record.title.empty() || record.paper_id.empty()) {
                report.details.push_back({pos, record.paper_id, "empty paper_id or title"});
                continue;
            }
            if (by_id_.contains(record.paper_id)) {
                report.details.push_back({pos, record.paper_id, "duplicate paper_id"});
                continue;
            }
            insert_locked(std::move(record), std::move(vector));
            ++report.count;
        } catch (const std::exception& e) {
            report.details.push_back({pos, "", std::string("malformed snapshot line: ") + e.what()});
        }
    }
    report.skipped = report.details.size();
    return report;
}

}  // namespace ideation::corpus
