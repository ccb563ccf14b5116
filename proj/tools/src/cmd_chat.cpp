#include <iostream>

#include "common.hpp"
#include "mhagent/domain/errors.hpp"
#include "mhagent/orchestrator/agent.hpp"
#include "mhagent/orchestrator/recommend.hpp"

namespace mhagent::cli {
namespace {

struct ChatOptions {
    std::string profile = "profile.json";
    std::string dialogue_backend = "env";
    std::string eval_backend = "env";
    int cadence = 5;
    std::size_t budget = 1024;
    std::string recommendations;
    std::vector<std::string> basic_info;
    BackendOptions backend;
};

void run_chat(const ChatOptions& o) {
    UserProfile profile;
    try {
        profile = load_profile(o.profile);
    } catch (const NoProfileError&) {
        profile = make_profile();
        std::cerr << "new profile " << profile.user_id << " at " << o.profile << "\n";
    }
    for (const auto& kv : o.basic_info) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw InputError("--info expects key=value, got " + kv);
        profile.basic_info[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    save_profile(profile, o.profile);

    orchestrator::OrchestratorConfig cfg;
    cfg.assessment_cadence = o.cadence;
    cfg.context_token_budget = o.budget;
    cfg.dialogue_params.seed = o.backend.seed;
    cfg.assessment_params.seed = o.backend.seed;
    if (!o.recommendations.empty()) cfg.recommendations = orchestrator::load_recommendations(o.recommendations);

    const auto settings = settings_from(o.backend);
    orchestrator::Orchestrator agent(open_backend(o.dialogue_backend, o.backend),
                                     open_backend(o.eval_backend, o.backend),
                                     backend::BatchSizer(settings.batch));
    auto session = agent.new_session(std::move(profile), cfg, std::filesystem::path(o.profile));

    std::cout << "Type a message and press enter; /quit to leave.\n";
    std::string line;
    while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
        if (line == "/quit" || line == "/exit") break;
        if (line.empty()) continue;
        try {
            const auto reply = agent.user_message(session, line, [](std::string_view chunk) {
                std::cout << chunk << std::flush;
            });
            std::cout << "\n";
            if (reply.assessed) {
                std::cout << "[assessment at turn " << session.turn_offset + reply.turn << "] "
                          << describe(*reply.assessed) << "\n";
                for (const auto& r : *reply.recommendations) std::cout << "  - " << r << "\n";
            }
            if (reply.assessment_error) std::cout << "[assessment failed: " << *reply.assessment_error << "]\n";
            if (reply.persist_error) std::cout << "[profile not saved: " << *reply.persist_error << "]\n";
        } catch (const Error& e) {
            std::cout << "\n[error: " << e.what() << "; message not counted]\n";
        }
    }
}

}  // namespace

void register_chat(CLI::App& app) {
    auto opts = std::make_shared<ChatOptions>();
    auto* cmd = app.add_subcommand("chat", "Talk to the agent in the terminal");
    cmd->add_option("--profile", opts->profile, "Profile file; created when missing");
    cmd->add_option("--dialogue-backend", opts->dialogue_backend, "URL, scripted:FILE or env");
    cmd->add_option("--eval-backend", opts->eval_backend, "URL, scripted:FILE or env");
    cmd->add_option("--cadence", opts->cadence, "Assess every N turns")->check(CLI::PositiveNumber);
    cmd->add_option("--budget", opts->budget, "Context token budget")->check(CLI::PositiveNumber);
    cmd->add_option("--recommendations", opts->recommendations, "JSON file with four recommendation tiers")
        ->check(CLI::ExistingFile);
    cmd->add_option("--info", opts->basic_info, "Profile background as key=value (repeatable)");
    add_backend_options(*cmd, opts->backend);
    cmd->callback([opts] { run_chat(*opts); });
}

}  // namespace mhagent::cli
