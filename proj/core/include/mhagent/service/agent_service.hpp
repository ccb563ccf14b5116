#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "mhagent/backend/backend.hpp"
#include "mhagent/backend/batch.hpp"
#include "mhagent/orchestrator/agent.hpp"

namespace mhagent::service {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::filesystem::path profile_dir = "profiles";
    std::optional<std::filesystem::path> static_dir;
    orchestrator::OrchestratorConfig orchestrator;
};

// Profile ids become file names, so only [A-Za-z0-9_-]{1,64} is accepted.
bool valid_profile_id(const std::string& id);

// HTTP front end over the orchestrator.
//
//   GET  /health
//   POST /sessions                     {"profile_id"?, "basic_info"?}  -> 201
//   GET  /sessions/{id}
//   DELETE /sessions/{id}
//   POST /sessions/{id}/messages       {"text", "stream"?}
//        stream (default): text/event-stream with "chunk" events and one
//        terminal "reply" or "error" event; otherwise a JSON reply.
//        A second request while one is in flight gets 409 {"error":"busy"}.
//   GET  /sessions/{id}/assessments
//   GET  /profiles/{id}
//
// Both backends are serialized, one request at a time per model.
class AgentService {
public:
    AgentService(std::shared_ptr<backend::Backend> dialogue, std::shared_ptr<backend::Backend> evaluation,
                 ServiceConfig config, backend::BatchSizer batch = backend::BatchSizer{});
    ~AgentService();

    AgentService(const AgentService&) = delete;
    AgentService& operator=(const AgentService&) = delete;

    // Binds and serves on a background thread; returns the bound port.
    // Throws IoError when the address cannot be bound.
    int start();
    // Binds and serves on the calling thread until stop().
    void run();
    void stop();

    int port() const;
    std::size_t session_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace mhagent::service
