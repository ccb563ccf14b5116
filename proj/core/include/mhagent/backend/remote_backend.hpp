#pragma once

#include <chrono>
#include <string>

#include <nlohmann/json.hpp>

#include "mhagent/backend/backend.hpp"

namespace mhagent::backend {

struct RemoteConfig {
    // http://host:port[/prefix]. An empty or "/" path means /v1/chat/completions;
    // any other prefix gets /chat/completions appended unless already present.
    std::string url;
    std::string api_key;
    std::string model = "default";
    int retries = 2;  // transport failures only
    std::chrono::milliseconds backoff{200};  // doubles per retry
    std::chrono::seconds timeout{120};
    // Asks llama.cpp-style servers to reuse the KV cache of a shared prompt
    // prefix. Servers that do not know the field ignore it.
    bool cache_prompt = true;
};

// Overrides url and api_key from BACKEND_URL / BACKEND_API_KEY when set.
RemoteConfig apply_env(RemoteConfig config);

struct Endpoint {
    std::string scheme_host_port;  // "http://127.0.0.1:8080"
    std::string path;              // "/v1/chat/completions"
};
// Throws ConfigError for unsupported schemes or malformed URLs.
Endpoint resolve_endpoint(const std::string& url);

// Chat-completions request body.
nlohmann::json build_request(const RemoteConfig& config, std::span<const ChatMessage> messages,
                             const GenerationParams& params, bool stream);

// Text of choices[0].message.content. Throws BackendError if the payload
// carries an "error" object, ParseError if the shape is unexpected.
std::string parse_completion(const nlohmann::json& body);

// Content delta of one streamed chunk (may be empty).
std::string parse_stream_delta(const nlohmann::json& chunk);

// Client for an OpenAI-compatible chat-completions server such as
// llama.cpp's llama-server. Each call opens its own connection, so
// concurrent calls are safe.
class RemoteBackend final : public Backend {
public:
    explicit RemoteBackend(RemoteConfig config);

    std::string generate(std::span<const ChatMessage> messages,
                         const GenerationParams& params) override;
    // Server-sent-event streaming. A connection that drops after the first
    // chunk raises PartialOutputError carrying the chunks received.
    std::string generate_stream(std::span<const ChatMessage> messages, const GenerationParams& params,
                                const ChunkSink& on_chunk) override;
    std::string name() const override { return "remote:" + config_.url; }

    const RemoteConfig& config() const { return config_; }

private:
    RemoteConfig config_;
    Endpoint endpoint_;
};

}  // namespace mhagent::backend
