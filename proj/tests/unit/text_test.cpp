#include <gtest/gtest.h>

#include "ideation/text.hpp"

namespace text = ideation::text;

TEST(Text, TrimAndCollapse) {
    EXPECT_EQ(text::trim("  \t a b \n"), "a b");
    EXPECT_EQ(text::trim(""), "");
    EXPECT_EQ(text::collapse_whitespace("  one\n\ntwo \t three  "), "one two three");
}

TEST(Text, SplitWhitespaceNeverYieldsEmpty) {
    auto parts = text::split_whitespace(" \ta  b\n\nc ");
    ASSERT_EQ(parts.size(), 3u);
    EXPECT_EQ(parts[0], "a");
    EXPECT_EQ(parts[2], "c");
    EXPECT_TRUE(text::split_whitespace(" \n\t").empty());
}

TEST(Text, SplitLinesHandlesCrLf) {
    auto lines = text::split_lines("a\r\nb\nc");
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], "a");
    EXPECT_EQ(lines[1], "b");
}

TEST(Text, Utf8Validation) {
    EXPECT_TRUE(text::is_valid_utf8("plain"));
    EXPECT_TRUE(text::is_valid_utf8("caf\xc3\xa9 \xe2\x80\x98q\xe2\x80\x99"));
    EXPECT_FALSE(text::is_valid_utf8("bad \xc3"));
    EXPECT_FALSE(text::is_valid_utf8("\xff\xfe"));
    EXPECT_FALSE(text::is_valid_utf8("\xc0\x80"));  // overlong NUL
}

TEST(Text, CaseHelpers) {
    EXPECT_EQ(text::to_lower("YeS"), "yes");
    EXPECT_TRUE(text::starts_with_icase("UNANSWERABLE.", "unanswerable"));
    EXPECT_FALSE(text::starts_with_icase("No", "not"));
    EXPECT_EQ(text::replace_all("a{x}b{x}", "{x}", "-"), "a-b-");
    EXPECT_EQ(text::join({"a", "b", "c"}, ", "), "a, b, c");
}
