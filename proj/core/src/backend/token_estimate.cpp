#include "mhagent/backend/token_estimate.hpp"

#include "mhagent/domain/text.hpp"

namespace mhagent::backend {

std::size_t estimate_tokens(std::string_view s) {
    std::size_t count = 0;
    bool in_word = false;
    for (char32_t cp : text::decode_utf8(s)) {
        if (text::is_cjk(cp)) {
            ++count;
            in_word = false;
        } else if (text::is_space(cp)) {
            in_word = false;
        } else if (!in_word) {
            ++count;
            in_word = true;
        }
    }
    return count;
}

std::size_t estimate_tokens(const ChatMessage& message) {
    return estimate_tokens(std::string_view(message.content)) + kMessageOverheadTokens;
}

std::size_t estimate_tokens(std::span<const ChatMessage> messages) {
    std::size_t total = 0;
    for (const auto& m : messages) total += estimate_tokens(m);
    return total;
}

}  // namespace mhagent::backend
