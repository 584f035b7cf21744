#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ideation::agents {

enum class Verdict { Yes, No, Unanswerable };

std::string_view to_string(Verdict v) noexcept;
Verdict verdict_from_string(std::string_view s);

/// Invariant: justification is set iff verdict == Yes.
struct BinaryAnswer {
    Verdict verdict = Verdict::Unanswerable;
    std::optional<std::string> justification;
    bool recognized = true;   // false when no verdict token led the text
    bool downgraded = false;  // a bare "Yes" with nothing to vet

    bool operator==(const BinaryAnswer&) const = default;
};

/// Total: never throws. The leading case-insensitive yes/no/unanswerable
/// word decides; for Yes the text after the separator is the justification,
/// and a Yes without one becomes Unanswerable. Anything else is Unanswerable
/// with recognized=false.
BinaryAnswer parse_binary_answer(std::string_view raw);

struct BulletList {
    std::vector<std::string> items;
    std::size_t dropped_lines = 0;  // heading or trailing prose outside the list

    /// No items: the gate must ask the researcher to author the list.
    bool needs_author() const noexcept { return items.empty(); }
};

/// Total: never throws. Lines starting with "-", "*", "•", "N." or "N)"
/// followed by whitespace become items with the marker stripped; a wrapped
/// line directly under an item continues it; everything else is dropped.
BulletList parse_bullets(std::string_view raw);

void to_json(nlohmann::json& j, const BinaryAnswer& a);
void from_json(const nlohmann::json& j, BinaryAnswer& a);

}  // namespace ideation::agents
