#include "vocabsplice/text.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "vocabsplice/csv.hpp"

using namespace vocabsplice;

TEST(Text, TrimAndCollapse) {
  EXPECT_EQ(text::trim("  a b \t\n"), "a b");
  EXPECT_EQ(text::trim(" \t "), "");
  EXPECT_EQ(text::collapse_spaces("  a \t b\n\nc  "), "a b c");
  EXPECT_EQ(text::collapse_spaces(""), "");
}

TEST(Text, SplitAndJoin) {
  EXPECT_EQ(text::split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(text::split("", ','), (std::vector<std::string>{""}));
  EXPECT_EQ(text::join({"a", "b", "c"}, "--"), "a--b--c");
  EXPECT_EQ(text::split_whitespace(" x  y\tz "), (std::vector<std::string>{"x", "y", "z"}));
}

TEST(Text, PunctuationIsAsciiOnly) {
  EXPECT_TRUE(text::is_punct('('));
  EXPECT_TRUE(text::is_punct('~'));
  EXPECT_FALSE(text::is_punct(' '));
  EXPECT_FALSE(text::is_punct('a'));
  EXPECT_FALSE(text::is_punct('\xE2'));
}

TEST(Text, Utf8Offsets) {
  const std::string s = "a\xE2\x80\x93" "b\xF0\x9F\x98\x80";  // a, en dash, b, emoji
  EXPECT_EQ(text::utf8_length(s), 4u);
  EXPECT_EQ(text::utf8_boundaries(s), (std::vector<std::size_t>{0, 1, 4, 5, 9}));
  EXPECT_EQ(text::utf8_index_of_byte(s, 4), 2u);
  EXPECT_EQ(text::utf8_byte_of_index(s, 3), 5u);
  EXPECT_EQ(text::utf8_byte_of_index(s, 4), 9u);
  EXPECT_EQ(text::utf8_byte_of_index(s, 5), std::string_view::npos);
  // A truncated sequence counts as single bytes.
  EXPECT_EQ(text::utf8_length("\xE2\x80"), 2u);
}

TEST(Text, Fnv1aKnownVectors) {
  EXPECT_EQ(text::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(text::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(text::fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(text::hex64(0xaf63dc4c8601ec8cULL), "af63dc4c8601ec8c");
  EXPECT_EQ(text::hex64(1), "0000000000000001");
}

TEST(Csv, QuotedFieldsAndBlankLines) {
  const auto rows = csv::parse("a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\n\n\"multi\nline\",\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1], (csv::Row{"x, y", "say \"hi\""}));
  EXPECT_EQ(rows[2], (csv::Row{"multi\nline", ""}));
}

TEST(Csv, Errors) {
  EXPECT_THROW(csv::parse("\"open"), Error);
  EXPECT_THROW(csv::parse("ab\"c\n"), Error);
  EXPECT_THROW(csv::parse_with_header("x,y\n1,2\n", {"a", "b"}, "t"), Error);
  EXPECT_THROW(csv::parse_with_header("a,b\n1\n", {"a", "b"}, "t"), Error);
  EXPECT_EQ(csv::parse_with_header("a,b\n1,2\n", {"a", "b"}, "t").size(), 1u);
}

TEST(Csv, FormatParseRoundTrip) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 500; ++i) {
    std::vector<csv::Row> rows;
    const std::size_t width = 1 + rng() % 4;
    const std::size_t height = 1 + rng() % 5;
    for (std::size_t r = 0; r < height; ++r) {
      csv::Row row;
      for (std::size_t c = 0; c < width; ++c) row.push_back(test::random_string(rng, "ab ,\"\n", 1, 6));
      rows.push_back(row);
    }
    std::string data;
    for (const auto& row : rows) data += csv::format_row(row);
    ASSERT_EQ(csv::parse(data), rows) << data;
  }
}
