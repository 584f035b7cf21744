#include "ideation/docproc/tokenizer.hpp"

#include <charconv>

#include "ideation/error.hpp"
#include "ideation/text.hpp"

namespace ideation::docproc {

std::size_t Tokenizer::count(std::string_view text) const {
    std::size_t n = 0;
    for (const auto& u : units(text)) n += cost(u);
    return n;
}

std::vector<std::string> WhitespaceTokenizer::units(std::string_view text) const {
    return text::split_whitespace(text);
}

CharRatioTokenizer::CharRatioTokenizer(std::size_t chars_per_token)
    : chars_per_token_(chars_per_token == 0 ? 1 : chars_per_token) {}

std::string CharRatioTokenizer::name() const { return "chars:" + std::to_string(chars_per_token_); }

std::vector<std::string> CharRatioTokenizer::units(std::string_view text) const {
    return text::split_whitespace(text);
}

std::size_t CharRatioTokenizer::cost(std::string_view unit) const {
    return (unit.size() + chars_per_token_ - 1) / chars_per_token_;
}

std::shared_ptr<const Tokenizer> make_tokenizer(std::string_view spec) {
    if (spec.empty() || spec == "whitespace") return std::make_shared<WhitespaceTokenizer>();
    if (spec.starts_with("chars:")) {
        auto digits = spec.substr(6);
        std::size_t n = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && n > 0)
            return std::make_shared<CharRatioTokenizer>(n);
    }
    fail(ErrorCode::Config, "unknown tokenizer '" + std::string(spec) +
                                "' (expected 'whitespace' or 'chars:<n>')");
}

}  // namespace ideation::docproc
