#include "mhagent/backend/chat.hpp"

#include "mhagent/domain/errors.hpp"

namespace mhagent::backend {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

Role role_from_string(std::string_view s) {
    if (s == "system") return Role::system;
    if (s == "user") return Role::user;
    if (s == "assistant") return Role::assistant;
    throw ParseError("role", "unknown role '" + std::string(s) + "'");
}

void validate(const GenerationParams& params) {
    if (!(params.temperature >= 0.0)) throw InputError("temperature must be >= 0");
    if (params.max_tokens < 1) throw InputError("max_tokens must be >= 1");
}

void validate_request(std::span<const ChatMessage> messages) {
    if (messages.empty()) throw InputError("request has no messages");
    if (messages.back().role != Role::user) throw InputError("last message must have role user");
    for (const auto& m : messages) {
        if (m.role != Role::system && m.content.empty()) {
            throw InputError(std::string(to_string(m.role)) + " message has empty content");
        }
    }
}

std::string_view last_user_content(std::span<const ChatMessage> messages) {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == Role::user) return it->content;
    }
    return {};
}

}  // namespace mhagent::backend
