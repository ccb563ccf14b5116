#pragma once

#include <filesystem>
#include <memory>
#include <mutex>

#include "mhagent/backend/backend.hpp"

namespace mhagent::backend {

// Serializes every call into the wrapped backend, mirroring one model
// context on a device that can only decode one request at a time.
class SerializedBackend final : public Backend {
public:
    explicit SerializedBackend(std::shared_ptr<Backend> inner);

    std::string generate(std::span<const ChatMessage> messages,
                         const GenerationParams& params) override;
    std::string generate_stream(std::span<const ChatMessage> messages, const GenerationParams& params,
                                const ChunkSink& on_chunk) override;
    std::string name() const override { return inner_->name(); }

private:
    std::shared_ptr<Backend> inner_;
    std::mutex mu_;
};

// Replays judge answers from a directory cache keyed by (prompt hash,
// input hash): the system messages form the prompt, everything else the
// input. Misses are forwarded and stored.
class CachingBackend final : public Backend {
public:
    CachingBackend(std::shared_ptr<Backend> inner, std::filesystem::path dir);

    std::string generate(std::span<const ChatMessage> messages,
                         const GenerationParams& params) override;
    std::string name() const override { return inner_->name(); }

    std::filesystem::path entry_path(std::span<const ChatMessage> messages,
                                     const GenerationParams& params) const;
    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    std::shared_ptr<Backend> inner_;
    std::filesystem::path dir_;
    std::mutex mu_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

}  // namespace mhagent::backend
