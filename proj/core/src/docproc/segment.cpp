#include <string>

#include "ideation/docproc/document.hpp"
#include "ideation/error.hpp"
#include "ideation/text.hpp"

namespace ideation::docproc {

DocumentText segment_paragraphs(std::string_view source, std::string paper_id) {
    std::string decoded;
    if (source.starts_with("%PDF-")) {
        try {
            decoded = extract_pdf_text(source);
        } catch (const Error& e) {
            fail(ErrorCode::ParseError, "paper '" + paper_id + "': " + e.what());
        }
    } else {
        if (!text::is_valid_utf8(source))
            fail(ErrorCode::ParseError, "paper '" + paper_id + "': source is not valid UTF-8");
        decoded.assign(source);
    }

    DocumentText doc{std::move(paper_id), {}};
    std::string block;
    auto flush = [&] {
        auto t = text::trim(block);
        if (!t.empty()) doc.paragraphs.emplace_back(t);
        block.clear();
    };
    for (auto line : text::split_lines(decoded)) {
        if (text::trim(line).empty()) {
            flush();
            continue;
        }
        if (!block.empty()) block += '\n';
        block += line;
    }
    flush();
    return doc;
}

}  // namespace ideation::docproc
