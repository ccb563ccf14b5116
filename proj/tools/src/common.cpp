#include "common.hpp"

#include "mhagent/backend/decorators.hpp"
#include "mhagent/domain/profile.hpp"

namespace mhagent::cli {

void add_backend_options(CLI::App& cmd, BackendOptions& opts) {
    cmd.add_option("--backend-config", opts.settings_file, "JSON file with url, api_key, model, retries, batch knobs")
        ->check(CLI::ExistingFile);
    cmd.add_option("--cache-dir", opts.cache_dir, "Replay cache for judge calls keyed by prompt and input hash");
    cmd.add_option("--seed", opts.seed, "Sampling seed passed to every model call");
}

backend::BackendSettings settings_from(const BackendOptions& opts) {
    std::optional<std::filesystem::path> file;
    if (!opts.settings_file.empty()) file = opts.settings_file;
    return backend::load_backend_settings(file);
}

std::shared_ptr<backend::Backend> open_backend(const std::string& spec, const BackendOptions& opts, bool cached) {
    auto b = backend::make_backend(spec, settings_from(opts));
    if (cached && !opts.cache_dir.empty()) b = std::make_shared<backend::CachingBackend>(b, opts.cache_dir);
    return b;
}

nlohmann::json manifest_base(const std::string& command, const BackendOptions& opts) {
    nlohmann::json m{{"command", command}, {"started_at", format_utc(now_utc())}};
    m["seed"] = opts.seed ? nlohmann::json(*opts.seed) : nlohmann::json(nullptr);
    if (!opts.cache_dir.empty()) m["cache_dir"] = opts.cache_dir;
    return m;
}

}  // namespace mhagent::cli
