#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mhagent/backend/backend.hpp"

namespace mhagent::backend {

// One scripted reaction. Rules are tried in order against the content of the
// last user message; the first match answers.
struct ScriptRule {
    enum class Match { exact, contains, any };

    Match match = Match::exact;
    std::string pattern;
    // Additional condition on the concatenated system messages.
    std::optional<std::string> system_contains;
    // One is chosen by hashing the request and seed; a single entry is the
    // common case.
    std::vector<std::string> replies;
    // When set the rule fails the call with BackendError(error) instead.
    std::optional<std::string> error;
};

struct Script {
    std::vector<ScriptRule> rules;
    // Reply when no rule matches. Without it an unmatched call is a BackendError.
    std::optional<std::string> fallback;
    // Code points per streamed chunk.
    std::size_t chunk_chars = 4;
};

// File format:
//   {"rules": [{"match": "ping", "reply": "pong"},
//              {"contains": "sad", "replies": ["a", "b"]},
//              {"contains": "boom", "error": "simulated failure"},
//              {"system_contains": "judge", "reply": "2,2,2,2,2"}],
//    "default": "...", "chunk_chars": 4}
Script script_from_json(const nlohmann::json& j);
Script load_script(const std::filesystem::path& path);

// Deterministic stand-in for a model. Output is a pure function of the
// request messages and the seed, which makes every orchestration and
// evaluation path exactly testable.
class ScriptedBackend final : public Backend {
public:
    using Responder = std::function<std::string(std::span<const ChatMessage>)>;

    explicit ScriptedBackend(Script script, std::string name = "scripted");
    // Programmatic form used by tests; the responder must itself be pure.
    explicit ScriptedBackend(Responder responder, std::size_t chunk_chars = 4,
                             std::string name = "scripted");

    std::string generate(std::span<const ChatMessage> messages,
                         const GenerationParams& params) override;
    std::string generate_stream(std::span<const ChatMessage> messages, const GenerationParams& params,
                                const ChunkSink& on_chunk) override;
    std::string name() const override { return name_; }

    // Every request seen so far, in arrival order.
    std::vector<std::vector<ChatMessage>> calls() const;
    std::size_t call_count() const;

private:
    std::string respond(std::span<const ChatMessage> messages, const GenerationParams& params) const;

    Script script_;
    Responder responder_;
    std::size_t chunk_chars_;
    std::string name_;
    mutable std::mutex mu_;
    std::vector<std::vector<ChatMessage>> calls_;
};

// Splits text into chunks of `chunk_chars` code points. Empty text yields no chunks.
std::vector<std::string> split_chunks(std::string_view text, std::size_t chunk_chars);

}  // namespace mhagent::backend
