#include "ideation/corpus/paper.hpp"

#include "ideation/error.hpp"

namespace ideation::corpus {

namespace {
std::optional<std::string> optional_text(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    fail(ErrorCode::ParseError, std::string("field '") + key + "' must be a string");
}

std::string required_text(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        fail(ErrorCode::ParseError, std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}
}  // namespace

void to_json(nlohmann::json& j, const PaperRecord& p) {
    j = nlohmann::json{{"paper_id", p.paper_id}, {"title", p.title}, {"abstract", p.abstract}};
    if (p.full_text_uri) j["full_text_uri"] = *p.full_text_uri;
    if (p.year) j["year"] = *p.year;
    if (p.venue) j["venue"] = *p.venue;
}

void from_json(const nlohmann::json& j, PaperRecord& p) {
    if (!j.is_object()) fail(ErrorCode::ParseError, "paper record must be a JSON object");
    p.paper_id = required_text(j, "paper_id");
    p.title = required_text(j, "title");
    p.abstract = j.contains("abstract") && !j["abstract"].is_null() ? required_text(j, "abstract") : "";
    p.full_text_uri = optional_text(j, "full_text_uri");
    p.year = optional_text(j, "year");
    p.venue = optional_text(j, "venue");
}

void to_json(nlohmann::json& j, const RetrievalHit& h) {
    j = nlohmann::json{{"paper_id", h.paper_id}, {"score", h.score}, {"rank", h.rank}};
}

void from_json(const nlohmann::json& j, RetrievalHit& h) {
    h.paper_id = j.at("paper_id").get<std::string>();
    h.score = j.at("score").get<double>();
    h.rank = j.at("rank").get<std::size_t>();
}

}  // namespace ideation::corpus
