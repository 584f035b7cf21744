#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ideation::workflow {

struct DiffOp {
    enum class Kind { Equal, Insert, Delete };
    Kind kind = Kind::Equal;
    std::string text;  // words joined by single spaces

    bool operator==(const DiffOp&) const = default;
};

/// Word-level LCS diff. Equal+Delete runs spell `before`, Equal+Insert runs
/// spell `after` (whitespace-normalized).
std::vector<DiffOp> word_diff(std::string_view before, std::string_view after);

nlohmann::json diff_to_json(const std::vector<DiffOp>& ops);

}  // namespace ideation::workflow
