#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mhagent/backend/backend.hpp"
#include "mhagent/backend/batch.hpp"

namespace mhagent::backend {

// Incremental-generation handle. The committed prefix is everything the
// model context already holds; it only grows until the session is reset.
struct GenerationSession {
    std::string session_id;
    std::vector<ChatMessage> committed_prefix;
    std::size_t token_count = 0;  // estimate over committed_prefix

    // Bookkeeping of the most recent step.
    std::size_t last_new_tokens = 0;
    int last_batch_size = 0;
};

GenerationSession make_generation_session(std::string session_id = {});

bool is_prefix(std::span<const ChatMessage> prefix, std::span<const ChatMessage> messages);

struct SessionStep {
    std::string reply;
    GenerationSession session;
};

// Continues `session` with the conversation `messages`, which must start
// with the committed prefix and add at least one message; only that suffix
// is new work. The reply is exactly what backend.generate(messages) returns,
// and the next session has prefix = messages + assistant reply.
// Throws ContractViolation if `messages` rewrites the prefix.
SessionStep extend_session(Backend& backend, const GenerationSession& session,
                           std::span<const ChatMessage> messages, const GenerationParams& params,
                           const BatchSizer& batch = BatchSizer{}, const ChunkSink& on_chunk = {});

// Clears the prefix, keeping the id.
GenerationSession reset(const GenerationSession& session);

}  // namespace mhagent::backend
