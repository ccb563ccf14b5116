#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "mhagent/backend/chat.hpp"

namespace mhagent::backend {

// One token per CJK character, one per whitespace-delimited word otherwise.
// A CJK character also ends the word before it, so "ok你好ok" counts 4.
// Monotone under appending, and
//   estimate_tokens(a + b) <= estimate_tokens(a) + estimate_tokens(b) + 1.
std::size_t estimate_tokens(std::string_view text);

// Role markers and separators a chat template wraps around each message.
inline constexpr std::size_t kMessageOverheadTokens = 4;

std::size_t estimate_tokens(const ChatMessage& message);
std::size_t estimate_tokens(std::span<const ChatMessage> messages);

}  // namespace mhagent::backend
