#include <gtest/gtest.h>

#include "mhagent/domain/text.hpp"

using namespace mhagent;

TEST(Text, CountsCodePointsNotBytes) {
    EXPECT_EQ(text::char_count(""), 0u);
    EXPECT_EQ(text::char_count("abc"), 3u);
    EXPECT_EQ(text::char_count("你好"), 2u);
    EXPECT_EQ(std::string("你好").size(), 6u);
    EXPECT_EQ(text::char_count("a你b"), 3u);
}

TEST(Text, DecodeEncodeRoundTrip) {
    const std::string s = "héllo 世界 😀";
    EXPECT_EQ(text::encode_utf8(text::decode_utf8(s)), s);
}

TEST(Text, InvalidBytesBecomeReplacementCharacters) {
    const std::string bad = std::string("a") + char(0xff) + "b";
    const auto cps = text::decode_utf8(bad);
    ASSERT_EQ(cps.size(), 3u);
    EXPECT_EQ(cps[1], U'\uFFFD');
}

TEST(Text, CollapseWhitespace) {
    EXPECT_EQ(text::collapse_whitespace("  a \t\n b  "), "a b");
    EXPECT_EQ(text::collapse_whitespace(""), "");
    EXPECT_EQ(text::collapse_whitespace("   "), "");
}

TEST(Text, Classification) {
    EXPECT_TRUE(text::is_cjk(U'你'));
    EXPECT_TRUE(text::is_cjk(U'の'));
    EXPECT_FALSE(text::is_cjk(U'a'));
    EXPECT_TRUE(text::is_punct(U'，'));
    EXPECT_TRUE(text::is_punct(U'.'));
    EXPECT_FALSE(text::is_punct(U'x'));
    EXPECT_TRUE(text::is_space(U' '));
}

TEST(Text, Fnv1aIsStable) {
    // Reference values of 64-bit FNV-1a.
    EXPECT_EQ(text::fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(text::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(text::hex64(0xabcULL), "0000000000000abc");
}
