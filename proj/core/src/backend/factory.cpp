#include "mhagent/backend/factory.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "mhagent/backend/scripted_backend.hpp"
#include "mhagent/domain/errors.hpp"

namespace mhagent::backend {

BackendSettings load_backend_settings(const std::optional<std::filesystem::path>& file) {
    BackendSettings s;
    if (file) {
        std::ifstream in(*file, std::ios::binary);
        if (!in) throw IoError("cannot open backend config " + file->string());
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
            if (j.contains("url")) s.remote.url = j.at("url").get<std::string>();
            if (j.contains("api_key")) s.remote.api_key = j.at("api_key").get<std::string>();
            if (j.contains("model")) s.remote.model = j.at("model").get<std::string>();
            if (j.contains("retries")) s.remote.retries = j.at("retries").get<int>();
            if (j.contains("timeout_s")) s.remote.timeout = std::chrono::seconds(j.at("timeout_s").get<int>());
            if (j.contains("min_batch")) s.batch.min_batch = j.at("min_batch").get<int>();
            if (j.contains("max_batch")) s.batch.max_batch = j.at("max_batch").get<int>();
            if (j.contains("ramp_tokens")) s.batch.ramp_tokens = j.at("ramp_tokens").get<std::size_t>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(file->string(), e.what());
        }
    }
    s.remote = apply_env(std::move(s.remote));
    BatchSizer validate_only(s.batch);
    return s;
}

std::shared_ptr<Backend> make_backend(std::string_view spec, const BackendSettings& settings) {
    constexpr std::string_view kScripted = "scripted:";
    if (spec.substr(0, kScripted.size()) == kScripted) {
        const std::filesystem::path file(std::string(spec.substr(kScripted.size())));
        return std::make_shared<ScriptedBackend>(load_script(file), "scripted:" + file.filename().string());
    }
    RemoteConfig cfg = settings.remote;
    if (!spec.empty() && spec != "env") cfg.url = std::string(spec);
    if (cfg.url.empty()) throw ConfigError("no backend URL given and BACKEND_URL is not set");
    return std::make_shared<RemoteBackend>(std::move(cfg));
}

}  // namespace mhagent::backend
