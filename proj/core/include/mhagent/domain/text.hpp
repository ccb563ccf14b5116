#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers. Text throughout the library is UTF-8; lengths that the
// pipeline cares about are counted in code points, never bytes.
namespace mhagent::text {

// Invalid byte sequences decode to U+FFFD, one per offending byte.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(char32_t cp);
std::string encode_utf8(std::u32string_view s);

std::size_t char_count(std::string_view s);

bool is_cjk(char32_t cp);
bool is_space(char32_t cp);
// ASCII punctuation plus the common Unicode punctuation blocks.
bool is_punct(char32_t cp);

// Collapses every whitespace run to one ASCII space and trims both ends.
std::string collapse_whitespace(std::string_view s);

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);

// Stable 64-bit FNV-1a, used wherever a hash must survive across runs.
std::uint64_t fnv1a64(std::string_view s, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace mhagent::text
