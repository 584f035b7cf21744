#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ideation::corpus {

struct PaperRecord {
    std::string paper_id;
    std::string title;
    std::string abstract;
    std::optional<std::string> full_text_uri;
    std::optional<std::string> year;
    std::optional<std::string> venue;

    bool operator==(const PaperRecord&) const = default;
};

struct DocEmbedding {
    std::string paper_id;
    std::vector<float> vector;
    std::string model_id;
};

struct RetrievalHit {
    std::string paper_id;
    double score = 0.0;  // cosine, clamped to [-1, 1]
    std::size_t rank = 0;  // 1-based

    bool operator==(const RetrievalHit&) const = default;
};

void to_json(nlohmann::json& j, const PaperRecord& p);
/// Throws ideation::Error(ParseError) on missing or mistyped required fields.
void from_json(const nlohmann::json& j, PaperRecord& p);

void to_json(nlohmann::json& j, const RetrievalHit& h);
void from_json(const nlohmann::json& j, RetrievalHit& h);

}  // namespace ideation::corpus
