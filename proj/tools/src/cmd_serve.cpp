#include <csignal>
#include <iostream>

#include "common.hpp"
#include "mhagent/service/agent_service.hpp"

namespace mhagent::cli {
namespace {

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string dialogue_backend = "env";
    std::string eval_backend = "env";
    std::string profile_dir = "profiles";
    std::string static_dir;
    int cadence = 5;
    std::size_t budget = 1024;
    BackendOptions backend;
};

service::AgentService* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

void run_serve(const ServeOptions& o) {
    service::ServiceConfig cfg;
    cfg.host = o.host;
    cfg.port = o.port;
    cfg.profile_dir = o.profile_dir;
    if (!o.static_dir.empty()) cfg.static_dir = o.static_dir;
    cfg.orchestrator.assessment_cadence = o.cadence;
    cfg.orchestrator.context_token_budget = o.budget;
    cfg.orchestrator.dialogue_params.seed = o.backend.seed;
    cfg.orchestrator.assessment_params.seed = o.backend.seed;
    if (o.host != "127.0.0.1" && o.host != "localhost" && o.host != "::1") {
        std::cerr << "warning: listening on " << o.host << " exposes profiles beyond this machine\n";
    }

    const auto settings = settings_from(o.backend);
    service::AgentService svc(open_backend(o.dialogue_backend, o.backend), open_backend(o.eval_backend, o.backend),
                              cfg, backend::BatchSizer(settings.batch));
    g_service = &svc;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on http://" << o.host << ":" << o.port << std::endl;
    svc.run();
    g_service = nullptr;
}

}  // namespace

void register_serve(CLI::App& app) {
    auto opts = std::make_shared<ServeOptions>();
    auto* cmd = app.add_subcommand("serve", "Run the HTTP/SSE agent service");
    cmd->add_option("--host", opts->host, "Bind address (loopback by default)");
    cmd->add_option("--port", opts->port, "Port")->check(CLI::Range(1, 65535));
    cmd->add_option("--dialogue-backend", opts->dialogue_backend, "URL, scripted:FILE or env");
    cmd->add_option("--eval-backend", opts->eval_backend, "URL, scripted:FILE or env");
    cmd->add_option("--profile-dir", opts->profile_dir, "Directory of profile files");
    cmd->add_option("--static-dir", opts->static_dir, "Serve a built web client from this directory")
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--cadence", opts->cadence, "Assess every N turns")->check(CLI::PositiveNumber);
    cmd->add_option("--budget", opts->budget, "Context token budget")->check(CLI::PositiveNumber);
    add_backend_options(*cmd, opts->backend);
    cmd->callback([opts] { run_serve(*opts); });
}

}  // namespace mhagent::cli
