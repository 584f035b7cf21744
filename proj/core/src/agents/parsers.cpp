#include "ideation/agents/parsers.hpp"

#include <array>
#include <cctype>

#include "ideation/error.hpp"
#include "ideation/text.hpp"

namespace ideation::agents {

namespace {

constexpr std::array<std::string_view, 4> kQuoteMarks = {"\xE2\x80\x98", "\xE2\x80\x99", "\xE2\x80\x9C",
                                                         "\xE2\x80\x9D"};

// Strips markdown emphasis and quote characters from the front.
std::string_view strip_decoration(std::string_view s) {
    bool changed = true;
    while (changed && !s.empty()) {
        changed = false;
        s = text::trim(s);
        if (!s.empty() && (s.front() == '*' || s.front() == '_' || s.front() == '"' ||
                           s.front() == '\'' || s.front() == '`')) {
            s.remove_prefix(1);
            changed = true;
            continue;
        }
        for (auto q : kQuoteMarks) {
            if (s.starts_with(q)) {
                s.remove_prefix(q.size());
                changed = true;
                break;
            }
        }
    }
    return s;
}

std::string_view strip_separators(std::string_view s) {
    bool changed = true;
    while (changed && !s.empty()) {
        changed = false;
        s = strip_decoration(s);
        if (!s.empty() && (s.front() == '.' || s.front() == ',' || s.front() == ':' ||
                           s.front() == ';' || s.front() == '!' || s.front() == '-')) {
            s.remove_prefix(1);
            changed = true;
            continue;
        }
        for (std::string_view dash : {std::string_view("\xE2\x80\x93"), std::string_view("\xE2\x80\x94")}) {
            if (s.starts_with(dash)) {
                s.remove_prefix(dash.size());
                changed = true;
                break;
            }
        }
    }
    return text::trim(s);
}

// Length of the marker (including following whitespace) if `line` is a bullet.
std::size_t bullet_marker(std::string_view line) {
    auto followed_by_space = [&](std::size_t n) {
        return n < line.size() && (line[n] == ' ' || line[n] == '\t');
    };
    if (line.empty()) return 0;
    if ((line[0] == '-' || line[0] == '*') && followed_by_space(1)) return 2;
    if (line.starts_with("\xE2\x80\xA2")) {
        if (line.size() == 3) return 3;
        if (followed_by_space(3)) return 4;
    }
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i < 4 && i < line.size() && (line[i] == '.' || line[i] == ')') && followed_by_space(i + 1))
        return i + 2;
    return 0;
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Yes: return "Yes";
        case Verdict::No: return "No";
        case Verdict::Unanswerable: return "Unanswerable";
    }
    return "Unanswerable";
}

Verdict verdict_from_string(std::string_view s) {
    if (s == "Yes") return Verdict::Yes;
    if (s == "No") return Verdict::No;
    if (s == "Unanswerable") return Verdict::Unanswerable;
    fail(ErrorCode::ParseError, "unknown verdict '" + std::string(s) + "'");
}

BinaryAnswer parse_binary_answer(std::string_view raw) {
    auto s = strip_decoration(raw);
    if (text::starts_with_icase(s, "answer:")) s = strip_decoration(s.substr(7));

    std::size_t n = 0;
    while (n < s.size() && std::isalpha(static_cast<unsigned char>(s[n]))) ++n;
    const auto word = text::to_lower(s.substr(0, n));

    BinaryAnswer answer;
    if (word == "no") {
        answer.verdict = Verdict::No;
    } else if (word == "unanswerable") {
        answer.verdict = Verdict::Unanswerable;
    } else if (word == "yes") {
        auto rest = strip_separators(s.substr(n));
        if (rest.empty()) {
            answer.verdict = Verdict::Unanswerable;
            answer.downgraded = true;
        } else {
            answer.verdict = Verdict::Yes;
            answer.justification = std::string(rest);
        }
    } else {
        answer.verdict = Verdict::Unanswerable;
        answer.recognized = false;
    }
    return answer;
}

BulletList parse_bullets(std::string_view raw) {
    BulletList list;
    bool can_continue = false;
    for (auto line : text::split_lines(raw)) {
        auto t = text::trim(line);
        if (t.empty()) {
            can_continue = false;
            continue;
        }
        if (auto m = bullet_marker(t)) {
            auto item = text::trim(t.substr(m));
            if (item.empty()) {
                can_continue = false;
                continue;
            }
            list.items.emplace_back(item);
            can_continue = true;
        } else if (can_continue && !list.items.empty()) {
            list.items.back() += ' ';
            list.items.back() += t;
        } else {
            ++list.dropped_lines;
        }
    }
    return list;
}

void to_json(nlohmann::json& j, const BinaryAnswer& a) {
    j = nlohmann::json{{"verdict", to_string(a.verdict)}, {"recognized", a.recognized},
                       {"downgraded", a.downgraded}};
    j["justification"] = a.justification ? nlohmann::json(*a.justification) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, BinaryAnswer& a) {
    a.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    a.recognized = j.value("recognized", true);
    a.downgraded = j.value("downgraded", false);
    if (auto it = j.find("justification"); it != j.end() && it->is_string())
        a.justification = it->get<std::string>();
    else
        a.justification.reset();
}

}  // namespace ideation::agents
