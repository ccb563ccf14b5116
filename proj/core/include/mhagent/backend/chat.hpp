#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mhagent::backend {

enum class Role { system, user, assistant };

std::string_view to_string(Role role);
// Throws ParseError for anything but "system", "user", "assistant".
Role role_from_string(std::string_view s);

struct ChatMessage {
    Role role = Role::user;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

inline ChatMessage system_message(std::string content) { return {Role::system, std::move(content)}; }
inline ChatMessage user_message(std::string content) { return {Role::user, std::move(content)}; }
inline ChatMessage assistant_message(std::string content) { return {Role::assistant, std::move(content)}; }

struct GenerationParams {
    double temperature = 0.7;
    int max_tokens = 512;
    std::optional<std::uint64_t> seed;

    friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

// Throws InputError on negative temperature or max_tokens < 1.
void validate(const GenerationParams& params);

// A request must be non-empty, end with a user message, and carry non-empty
// content on every user/assistant message. Throws InputError otherwise.
void validate_request(std::span<const ChatMessage> messages);

// Last user message content, or empty when there is none.
std::string_view last_user_content(std::span<const ChatMessage> messages);

}  // namespace mhagent::backend
