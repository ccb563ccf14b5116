#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mhagent/backend/backend.hpp"
#include "mhagent/backend/batch.hpp"
#include "mhagent/backend/session.hpp"
#include "mhagent/domain/dialogue.hpp"
#include "mhagent/domain/profile.hpp"
#include "mhagent/orchestrator/recommend.hpp"

namespace mhagent::orchestrator {

extern const char* const kDefaultSystemPromptTemplate;
extern const char* const kDefaultAssessmentPrompt;

struct OrchestratorConfig {
    int assessment_cadence = 5;
    std::size_t context_token_budget = 1024;
    // Placeholders: {basic_info}, {latest_state}. Both render to "" when
    // there is nothing to say.
    std::string system_prompt_template = kDefaultSystemPromptTemplate;
    std::string assessment_prompt = kDefaultAssessmentPrompt;
    backend::GenerationParams dialogue_params{0.7, 512, std::nullopt};
    backend::GenerationParams assessment_params{0.0, 64, std::nullopt};
    int assessment_retries = 2;
    RecommendationTable recommendations = default_recommendations();
};

// Throws ConfigError: cadence < 1, budget too small for the bare system prompt.
void validate(const OrchestratorConfig& config);

std::string render_basic_info(const UserProfile& profile);
std::string render_state_clause(const AssessmentRecord& record);
std::string render_system_prompt(const std::string& tmpl, const UserProfile& profile);

struct SessionState {
    UserProfile profile;
    std::optional<std::filesystem::path> profile_path;  // saved after each assessment when set
    std::vector<Turn> history;  // retained window; older turns are pruned
    int global_turn = 0;        // completed user turns, pruned ones included
    int turn_offset = 0;        // at_turn of the profile's latest record at session start
    std::string system_prompt;
    backend::GenerationSession dialogue_session;
    OrchestratorConfig config;
};

struct AgentReply {
    std::string text;
    int turn = 0;  // global_turn after this message
    std::optional<MentalState> assessed;
    std::optional<std::vector<std::string>> recommendations;
    // Set on a cadence turn whose assessment failed; the turn still counts.
    std::optional<std::string> assessment_error;
    // Set when the assessment succeeded but writing the profile failed.
    std::optional<std::string> persist_error;
};

// {"depression": {"level": 2, "label": "moderate"}, "anxiety": {...}}
nlohmann::json state_to_json(const MentalState& state);
nlohmann::json reply_to_json(const AgentReply& reply);

struct Assessment {
    MentalState state;
    std::vector<std::string> evidence;
};

// The agent loop: dialogue model for replies, evaluation model for periodic
// mental-state assessment, profile persistence after each assessment.
// Stateless apart from the backends, so one instance can drive any number
// of sessions concurrently as long as each SessionState has one writer.
class Orchestrator {
public:
    Orchestrator(std::shared_ptr<backend::Backend> dialogue, std::shared_ptr<backend::Backend> evaluation,
                 backend::BatchSizer batch = backend::BatchSizer{});

    // Throws ConfigError on an invalid config or a system prompt over budget.
    SessionState new_session(UserProfile profile, OrchestratorConfig config = {},
                             std::optional<std::filesystem::path> profile_path = std::nullopt) const;

    // [system] + the newest history turns that fit + [user]. Oldest turns go
    // first, whole turns at a time. Throws InputError on empty text or when
    // the system prompt plus the text alone exceed the budget.
    std::vector<backend::ChatMessage> assemble_prompt(const SessionState& session,
                                                      std::string_view user_text) const;

    // One conversational turn. On a backend failure the exception propagates
    // and `session` is unchanged. Assessment failures are reported in the
    // reply and never abort the turn.
    AgentReply user_message(SessionState& session, std::string_view user_text,
                            const backend::ChunkSink& on_chunk = {}) const;

    // Merges the last `cadence` user queries and asks the evaluation model.
    // Throws AssessmentError when every attempt fails.
    Assessment assess(const SessionState& session) const;

private:
    std::shared_ptr<backend::Backend> dialogue_;
    std::shared_ptr<backend::Backend> evaluation_;
    backend::BatchSizer batch_;
};

}  // namespace mhagent::orchestrator
