#include "mhagent/backend/backend.hpp"

namespace mhagent::backend {

std::string Backend::generate_stream(std::span<const ChatMessage> messages,
                                     const GenerationParams& params, const ChunkSink& on_chunk) {
    std::string text = generate(messages, params);
    if (!text.empty() && on_chunk) on_chunk(text);
    return text;
}

}  // namespace mhagent::backend
