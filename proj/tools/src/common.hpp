#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mhagent/backend/backend.hpp"
#include "mhagent/backend/factory.hpp"

namespace mhagent::cli {

// Options every subcommand that talks to a model shares.
struct BackendOptions {
    std::string settings_file;
    std::string cache_dir;
    std::optional<std::uint64_t> seed;
};

void add_backend_options(CLI::App& cmd, BackendOptions& opts);

backend::BackendSettings settings_from(const BackendOptions& opts);

// Builds a backend from a spec; judge backends get the on-disk cache when
// --cache-dir is set.
std::shared_ptr<backend::Backend> open_backend(const std::string& spec, const BackendOptions& opts,
                                               bool cached = false);

// Manifest fields common to every pipeline stage.
nlohmann::json manifest_base(const std::string& command, const BackendOptions& opts);

void register_chat(CLI::App& app);
void register_serve(CLI::App& app);
void register_data(CLI::App& app);
void register_eval(CLI::App& app);

}  // namespace mhagent::cli
