#include "ideation/workflow/diff.hpp"

#include <algorithm>
#include <cstdint>

#include "ideation/text.hpp"

namespace ideation::workflow {

namespace {
void push(std::vector<DiffOp>& out, DiffOp::Kind kind, std::string_view word) {
    if (!out.empty() && out.back().kind == kind) {
        out.back().text += ' ';
        out.back().text += word;
    } else {
        out.push_back({kind, std::string(word)});
    }
}
}  // namespace

std::vector<DiffOp> word_diff(std::string_view before, std::string_view after) {
    auto a = text::split_whitespace(before);
    auto b = text::split_whitespace(after);
    const std::size_t n = a.size(), m = b.size();
    // lcs[i][j] = LCS length of a[i..] and b[j..]
    std::vector<std::vector<std::uint32_t>> lcs(n + 1, std::vector<std::uint32_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);

    std::vector<DiffOp> out;
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (a[i] == b[j]) {
            push(out, DiffOp::Kind::Equal, a[i]);
            ++i, ++j;
        } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
            push(out, DiffOp::Kind::Delete, a[i++]);
        } else {
            push(out, DiffOp::Kind::Insert, b[j++]);
        }
    }
    for (; i < n; ++i) push(out, DiffOp::Kind::Delete, a[i]);
    for (; j < m; ++j) push(out, DiffOp::Kind::Insert, b[j]);
    return out;
}

nlohmann::json diff_to_json(const std::vector<DiffOp>& ops) {
    auto arr = nlohmann::json::array();
    for (const auto& op : ops) {
        const char* k = op.kind == DiffOp::Kind::Equal    ? "equal"
                        : op.kind == DiffOp::Kind::Insert ? "insert"
                                                          : "delete";
        arr.push_back({{"op", k}, {"text", op.text}});
    }
    return arr;
}

}  // namespace ideation::workflow
