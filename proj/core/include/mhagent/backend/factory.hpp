#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "mhagent/backend/backend.hpp"
#include "mhagent/backend/batch.hpp"
#include "mhagent/backend/remote_backend.hpp"

namespace mhagent::backend {

// Settings shared by every backend a tool creates. Loaded from an optional
// JSON file, then BACKEND_URL / BACKEND_API_KEY override:
//   {"url": "http://127.0.0.1:8080", "api_key": "...", "model": "...",
//    "retries": 2, "min_batch": 32, "max_batch": 512, "ramp_tokens": 512}
struct BackendSettings {
    RemoteConfig remote;
    BatchConfig batch;
};

BackendSettings load_backend_settings(const std::optional<std::filesystem::path>& file);

// "scripted:FILE" builds a ScriptedBackend; "http://..." a RemoteBackend;
// "env" (or empty) a RemoteBackend on the configured/BACKEND_URL address.
std::shared_ptr<Backend> make_backend(std::string_view spec, const BackendSettings& settings);

}  // namespace mhagent::backend
