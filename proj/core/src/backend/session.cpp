#include "mhagent/backend/session.hpp"

#include "mhagent/backend/token_estimate.hpp"
#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/profile.hpp"

namespace mhagent::backend {

GenerationSession make_generation_session(std::string session_id) {
    GenerationSession s;
    s.session_id = session_id.empty() ? generate_user_id() : std::move(session_id);
    return s;
}

bool is_prefix(std::span<const ChatMessage> prefix, std::span<const ChatMessage> messages) {
    if (prefix.size() > messages.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (!(prefix[i] == messages[i])) return false;
    }
    return true;
}

SessionStep extend_session(Backend& backend, const GenerationSession& session,
                           std::span<const ChatMessage> messages, const GenerationParams& params,
                           const BatchSizer& batch, const ChunkSink& on_chunk) {
    if (!is_prefix(session.committed_prefix, messages)) {
        throw ContractViolation("messages rewrite the committed prefix of session " + session.session_id +
                                "; reset the session instead");
    }
    if (messages.size() == session.committed_prefix.size()) {
        throw ContractViolation("extend_session needs at least one new message");
    }
    const auto fresh = messages.subspan(session.committed_prefix.size());
    const std::size_t new_tokens = estimate_tokens(fresh);

    std::string reply = on_chunk ? backend.generate_stream(messages, params, on_chunk)
                                 : backend.generate(messages, params);

    SessionStep step{std::move(reply), session};
    auto& next = step.session;
    next.committed_prefix.insert(next.committed_prefix.end(), fresh.begin(), fresh.end());
    next.committed_prefix.push_back(assistant_message(step.reply));
    next.token_count = session.token_count + new_tokens + estimate_tokens(next.committed_prefix.back());
    next.last_new_tokens = new_tokens;
    next.last_batch_size = batch.batch_size_for(new_tokens);
    return step;
}

GenerationSession reset(const GenerationSession& session) {
    GenerationSession s;
    s.session_id = session.session_id;
    return s;
}

}  // namespace mhagent::backend
