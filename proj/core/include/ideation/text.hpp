#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the parsers and the document pipeline.
namespace ideation::text {

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix) noexcept;

/// Splits on runs of ASCII whitespace; never yields empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

std::vector<std::string_view> split_lines(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool is_valid_utf8(std::string_view s) noexcept;

/// Collapses every whitespace run (newlines included) to one space and trims.
std::string collapse_whitespace(std::string_view s);

/// Replaces every occurrence of `from` in `s`.
std::string replace_all(std::string s, std::string_view from, std::string_view to);

}  // namespace ideation::text
