#include <cstdio>

#include "ideation/docproc/document.hpp"
#include "ideation/error.hpp"
#include "ideation/text.hpp"

namespace ideation::docproc {

std::vector<Piece> split_to_fit(std::string_view paragraph, std::size_t max_tokens,
                                const Tokenizer& tokenizer) {
    if (max_tokens == 0) fail(ErrorCode::InvalidArgument, "max_tokens must be >= 1");
    std::vector<Piece> pieces;
    std::vector<std::string> current;
    std::size_t current_cost = 0;
    auto flush = [&](bool oversize) {
        if (current.empty()) return;
        pieces.push_back({text::join(current, " "), current_cost, oversize});
        current.clear();
        current_cost = 0;
    };
    for (auto& unit : tokenizer.units(paragraph)) {
        const auto c = tokenizer.cost(unit);
        if (c > max_tokens) {
            flush(false);
            current.push_back(std::move(unit));
            current_cost = c;
            flush(true);
            continue;
        }
        if (current_cost + c > max_tokens) flush(false);
        current.push_back(std::move(unit));
        current_cost += c;
    }
    flush(false);
    return pieces;
}

std::string make_chunk_id(std::string_view paper_id, std::size_t paragraph, std::size_t split) {
    char suffix[48];
    std::snprintf(suffix, sizeof suffix, ":%04zu.%03zu", paragraph, split);
    return std::string(paper_id) + suffix;
}

std::vector<Chunk> chunk_document(const DocumentText& doc, std::size_t max_tokens,
                                  const Tokenizer& tokenizer) {
    std::vector<Chunk> chunks;
    for (std::size_t p = 0; p < doc.paragraphs.size(); ++p) {
        auto pieces = split_to_fit(doc.paragraphs[p], max_tokens, tokenizer);
        for (std::size_t s = 0; s < pieces.size(); ++s) {
            chunks.push_back(Chunk{make_chunk_id(doc.paper_id, p, s), doc.paper_id, p, s,
                                   std::move(pieces[s].text), pieces[s].token_count,
                                   pieces[s].oversize});
        }
    }
    return chunks;
}

void to_json(nlohmann::json& j, const Chunk& c) {
    j = nlohmann::json{{"chunk_id", c.chunk_id},           {"paper_id", c.paper_id},
                       {"paragraph_index", c.paragraph_index}, {"split_index", c.split_index},
                       {"text", c.text},                   {"token_count", c.token_count}};
    if (c.oversize) j["oversize"] = true;
}

void from_json(const nlohmann::json& j, Chunk& c) {
    c.chunk_id = j.at("chunk_id").get<std::string>();
    c.paper_id = j.at("paper_id").get<std::string>();
    c.paragraph_index = j.at("paragraph_index").get<std::size_t>();
    c.split_index = j.at("split_index").get<std::size_t>();
    c.text = j.at("text").get<std::string>();
    c.token_count = j.at("token_count").get<std::size_t>();
    c.oversize = j.value("oversize", false);
}

}  // namespace ideation::docproc
