#include <gtest/gtest.h>

#include <random>

#include "ideation/agents/parsers.hpp"
#include "ideation/error.hpp"

using namespace ideation::agents;

TEST(BinaryAnswer, LeadingVerdictDecides) {
    auto yes = parse_binary_answer("Yes. Paragraph p1:0002.000 describes the same system.");
    EXPECT_EQ(yes.verdict, Verdict::Yes);
    EXPECT_EQ(yes.justification, "Paragraph p1:0002.000 describes the same system.");
    EXPECT_TRUE(yes.recognized);

    EXPECT_EQ(parse_binary_answer("No").verdict, Verdict::No);
    EXPECT_EQ(parse_binary_answer("  no, the paper is about proteins").verdict, Verdict::No);
    EXPECT_EQ(parse_binary_answer("UNANSWERABLE").verdict, Verdict::Unanswerable);
    EXPECT_EQ(parse_binary_answer("**Yes** - it does").justification, "it does");
    EXPECT_EQ(parse_binary_answer("'Yes': it does").verdict, Verdict::Yes);
    EXPECT_EQ(parse_binary_answer("Answer: Yes, see paragraph 2").justification, "see paragraph 2");
    EXPECT_EQ(parse_binary_answer("\xE2\x80\x98Yes\xE2\x80\x99 \xE2\x80\x94 clearly").justification, "clearly");
}

TEST(BinaryAnswer, BareYesIsDowngraded) {
    auto a = parse_binary_answer("Yes.");
    EXPECT_EQ(a.verdict, Verdict::Unanswerable);
    EXPECT_TRUE(a.downgraded);
    EXPECT_FALSE(a.justification);
}

TEST(BinaryAnswer, ProseIsUnrecognized) {
    for (const char* s : {"", "I think so", "Yesterday we saw", "Nothing here", "Maybe"}) {
        auto a = parse_binary_answer(s);
        EXPECT_EQ(a.verdict, Verdict::Unanswerable) << s;
        EXPECT_FALSE(a.recognized) << s;
    }
}

TEST(BinaryAnswer, TotalOnArbitraryBytes) {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> byte(0, 255), len(0, 64);
    for (int i = 0; i < 2000; ++i) {
        std::string s(static_cast<std::size_t>(len(rng)), '\0');
        for (auto& c : s) c = static_cast<char>(byte(rng));
        if (i % 3 == 0) s = "yes" + s;
        BinaryAnswer a;
        ASSERT_NO_THROW(a = parse_binary_answer(s));
        EXPECT_EQ(a.justification.has_value(), a.verdict == Verdict::Yes);
    }
}

TEST(BinaryAnswer, JsonRoundTrip) {
    auto a = parse_binary_answer("Yes: because");
    nlohmann::json j = a;
    EXPECT_EQ(j.get<BinaryAnswer>(), a);
    EXPECT_EQ(verdict_from_string("No"), Verdict::No);
    EXPECT_THROW(verdict_from_string("maybe"), ideation::Error);
}

TEST(Bullets, MarkersAndContinuations) {
    auto list = parse_bullets(
        "Here are the gaps:\n"
        "- first gap\n"
        "  wrapped onto a second line\n"
        "* second gap\n"
        "\xE2\x80\xA2 third gap\n"
        "1. fourth gap\n"
        "12) fifth gap\n"
        "\n"
        "In summary, these matter.\n");
    ASSERT_EQ(list.items.size(), 5u);
    EXPECT_EQ(list.items[0], "first gap wrapped onto a second line");
    EXPECT_EQ(list.items[2], "third gap");
    EXPECT_EQ(list.items[4], "fifth gap");
    EXPECT_EQ(list.dropped_lines, 2u);
    EXPECT_FALSE(list.needs_author());
}

TEST(Bullets, NoListNeedsAuthor) {
    auto list = parse_bullets("The paper has no obvious gaps.\n-not a bullet\n2024.5 numbers");
    EXPECT_TRUE(list.items.empty());
    EXPECT_TRUE(list.needs_author());
    EXPECT_EQ(list.dropped_lines, 3u);
    EXPECT_TRUE(parse_bullets("").needs_author());
}
