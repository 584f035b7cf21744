#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ideation/docproc/tokenizer.hpp"

namespace ideation::docproc {

struct DocumentText {
    std::string paper_id;
    std::vector<std::string> paragraphs;
};

/// Paragraphs are blocks separated by blank (whitespace-only) lines, trimmed,
/// empties dropped. Sources starting with "%PDF-" go through the best-effort
/// PDF text path first. Throws ParseError (message carries paper_id) for
/// invalid UTF-8 or a PDF with no recoverable text.
DocumentText segment_paragraphs(std::string_view source, std::string paper_id);

/// Best-effort text recovery from PDF content streams (uncompressed or
/// FlateDecode). Each text object becomes its own paragraph.
std::string extract_pdf_text(std::string_view bytes);

struct Piece {
    std::string text;
    std::size_t token_count = 0;
    bool oversize = false;  // a single unit whose cost exceeds the budget
};

/// Greedy left-to-right fill: each piece takes units until the next would
/// overflow `max_tokens`. A unit that alone exceeds the budget is emitted by
/// itself with `oversize` set. Throws InvalidArgument when max_tokens == 0.
std::vector<Piece> split_to_fit(std::string_view paragraph, std::size_t max_tokens,
                                 const Tokenizer& tokenizer);

struct Chunk {
    std::string chunk_id;
    std::string paper_id;
    std::size_t paragraph_index = 0;
    std::size_t split_index = 0;
    std::string text;
    std::size_t token_count = 0;
    bool oversize = false;

    bool operator==(const Chunk&) const = default;
};

std::string make_chunk_id(std::string_view paper_id, std::size_t paragraph, std::size_t split);

std::vector<Chunk> chunk_document(const DocumentText& doc, std::size_t max_tokens,
                                  const Tokenizer& tokenizer);

void to_json(nlohmann::json& j, const Chunk& c);
void from_json(const nlohmann::json& j, Chunk& c);

}  // namespace ideation::docproc
