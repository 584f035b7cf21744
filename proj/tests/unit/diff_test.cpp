#include <gtest/gtest.h>

#include <random>

#include "ideation/text.hpp"
#include "ideation/workflow/diff.hpp"

using namespace ideation;
using namespace ideation::workflow;

namespace {

std::string spell(const std::vector<DiffOp>& ops, DiffOp::Kind skip) {
    std::vector<std::string> words;
    for (const auto& op : ops)
        if (op.kind != skip && !op.text.empty()) words.push_back(op.text);
    return text::join(words, " ");
}

std::string normalized(std::string_view s) { return text::join(text::split_whitespace(s), " "); }

}  // namespace

TEST(WordDiff, Basic) {
    auto ops = word_diff("the quick fox", "the slow fox jumps");
    std::vector<DiffOp> want = {{DiffOp::Kind::Equal, "the"},
                                {DiffOp::Kind::Delete, "quick"},
                                {DiffOp::Kind::Insert, "slow"},
                                {DiffOp::Kind::Equal, "fox"},
                                {DiffOp::Kind::Insert, "jumps"}};
    EXPECT_EQ(ops, want);
    EXPECT_TRUE(word_diff("", "").empty());
    auto j = diff_to_json(ops);
    ASSERT_TRUE(j.is_array());
    EXPECT_EQ(j.size(), 5u);
}

TEST(WordDiff, ReconstructsBothSides) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> len(0, 30), word(0, 6);
    const char* vocab[] = {"a", "b", "c", "d", "e", "f", "g"};
    for (int round = 0; round < 300; ++round) {
        std::string before, after;
        for (int i = len(rng); i > 0; --i) (before += vocab[word(rng)]) += (i % 4 ? " " : "\n  ");
        for (int i = len(rng); i > 0; --i) (after += vocab[word(rng)]) += " ";
        auto ops = word_diff(before, after);
        EXPECT_EQ(spell(ops, DiffOp::Kind::Insert), normalized(before));
        EXPECT_EQ(spell(ops, DiffOp::Kind::Delete), normalized(after));
        for (std::size_t i = 1; i < ops.size(); ++i) EXPECT_NE(ops[i].kind, ops[i - 1].kind) << "runs not merged";
    }
}
