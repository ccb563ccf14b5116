#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "mhagent/backend/chat.hpp"

namespace mhagent::backend {

using ChunkSink = std::function<void(std::string_view)>;

// A text-generation model. Implementations must accept concurrent generate
// calls; wrap in SerializedBackend to model a single on-device context.
class Backend {
public:
    virtual ~Backend() = default;

    virtual std::string generate(std::span<const ChatMessage> messages,
                                 const GenerationParams& params) = 0;

    // Delivers the reply incrementally and returns the full text. The
    // concatenated chunks always equal the returned text. The default
    // implementation emits the whole reply as one chunk (none if empty).
    virtual std::string generate_stream(std::span<const ChatMessage> messages,
                                        const GenerationParams& params, const ChunkSink& on_chunk);

    virtual std::string name() const = 0;
};

}  // namespace mhagent::backend
