#include "mhagent/orchestrator/agent.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "mhagent/backend/token_estimate.hpp"
#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/extract.hpp"

namespace mhagent::orchestrator {

using backend::ChatMessage;

const char* const kDefaultSystemPromptTemplate =
    "You are a warm and professional psychological counselor. Listen actively, reflect the client's "
    "feelings, ask gentle follow-up questions, and offer concrete, safe suggestions when the time is "
    "right.{basic_info}{latest_state}";

const char* const kDefaultAssessmentPrompt =
    "You assess the severity of depression and anxiety expressed in a client's recent messages. "
    "Severity levels: 0 minimal, 1 mild, 2 moderate, 3 severe. "
    "Answer with exactly one line in the form: depression:<level> anxiety:<level>";

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

}  // namespace

void validate(const OrchestratorConfig& config) {
    if (config.assessment_cadence < 1) throw ConfigError("assessment_cadence must be >= 1");
    if (config.context_token_budget < 1) throw ConfigError("context_token_budget must be >= 1");
    if (config.assessment_retries < 0) throw ConfigError("assessment_retries must be >= 0");
    backend::validate(config.dialogue_params);
    backend::validate(config.assessment_params);
    const std::string bare = render_system_prompt(config.system_prompt_template, UserProfile{});
    if (backend::estimate_tokens(backend::system_message(bare)) > config.context_token_budget) {
        throw ConfigError("context_token_budget is smaller than the system prompt");
    }
}

std::string render_basic_info(const UserProfile& profile) {
    if (profile.basic_info.empty()) return {};
    std::string out = " Client background: ";
    bool first = true;
    for (const auto& [k, v] : profile.basic_info) {
        if (!first) out += "; ";
        out += k + ": " + v;
        first = false;
    }
    out += ".";
    return out;
}

std::string render_state_clause(const AssessmentRecord& record) {
    return " Latest mental-state assessment (turn " + std::to_string(record.at_turn) +
           "): " + describe(record.state) + ". Take this into account in tone and suggestions.";
}

std::string render_system_prompt(const std::string& tmpl, const UserProfile& profile) {
    std::string out = tmpl;
    replace_all(out, "{basic_info}", render_basic_info(profile));
    const auto* latest = profile.latest();
    replace_all(out, "{latest_state}", latest ? render_state_clause(*latest) : std::string{});
    return out;
}

nlohmann::json state_to_json(const MentalState& state) {
    auto level = [](SeverityLevel l) { return nlohmann::json{{"level", l.value()}, {"label", l.name()}}; };
    return nlohmann::json{{"depression", level(state.depression)}, {"anxiety", level(state.anxiety)}};
}

nlohmann::json reply_to_json(const AgentReply& reply) {
    nlohmann::json j{{"text", reply.text}, {"turn", reply.turn}};
    j["assessed"] = reply.assessed ? state_to_json(*reply.assessed) : nlohmann::json(nullptr);
    j["recommendations"] = reply.recommendations ? nlohmann::json(*reply.recommendations) : nlohmann::json(nullptr);
    if (reply.assessment_error) j["assessment_error"] = *reply.assessment_error;
    if (reply.persist_error) j["persist_error"] = *reply.persist_error;
    return j;
}

Orchestrator::Orchestrator(std::shared_ptr<backend::Backend> dialogue,
                           std::shared_ptr<backend::Backend> evaluation, backend::BatchSizer batch)
    : dialogue_(std::move(dialogue)), evaluation_(std::move(evaluation)), batch_(std::move(batch)) {
    if (!dialogue_ || !evaluation_) throw ConfigError("orchestrator needs both a dialogue and an evaluation backend");
}

SessionState Orchestrator::new_session(UserProfile profile, OrchestratorConfig config,
                                       std::optional<std::filesystem::path> profile_path) const {
    validate(config);
    validate(profile);
    SessionState s;
    s.system_prompt = render_system_prompt(config.system_prompt_template, profile);
    if (backend::estimate_tokens(backend::system_message(s.system_prompt)) > config.context_token_budget) {
        throw ConfigError("rendered system prompt exceeds context_token_budget");
    }
    s.turn_offset = profile.latest() ? profile.latest()->at_turn : 0;
    s.profile = std::move(profile);
    s.profile_path = std::move(profile_path);
    s.config = std::move(config);
    s.dialogue_session = backend::make_generation_session();
    return s;
}

std::vector<ChatMessage> Orchestrator::assemble_prompt(const SessionState& session,
                                                       std::string_view user_text) const {
    if (user_text.empty()) throw InputError("user message is empty");
    const ChatMessage system = backend::system_message(session.system_prompt);
    const ChatMessage user = backend::user_message(std::string(user_text));
    const std::size_t budget = session.config.context_token_budget;
    std::size_t used = backend::estimate_tokens(system) + backend::estimate_tokens(user);
    if (used > budget) throw InputError("message does not fit in the context budget");

    std::size_t keep = 0;
    for (auto it = session.history.rbegin(); it != session.history.rend(); ++it) {
        const std::size_t cost = backend::estimate_tokens(backend::user_message(it->query)) +
                                 backend::estimate_tokens(backend::assistant_message(it->reply));
        if (used + cost > budget) break;
        used += cost;
        ++keep;
    }

    std::vector<ChatMessage> out;
    out.reserve(2 + 2 * keep);
    out.push_back(system);
    for (std::size_t i = session.history.size() - keep; i < session.history.size(); ++i) {
        out.push_back(backend::user_message(session.history[i].query));
        out.push_back(backend::assistant_message(session.history[i].reply));
    }
    out.push_back(user);
    return out;
}

AgentReply Orchestrator::user_message(SessionState& session, std::string_view user_text,
                                      const backend::ChunkSink& on_chunk) const {
    const auto prompt = assemble_prompt(session, user_text);

    // Reuse the model context when the new prompt only appends to it; a
    // pruned window or a refreshed system prompt forces a rebuild.
    const bool extends = backend::is_prefix(session.dialogue_session.committed_prefix, prompt) &&
                         prompt.size() > session.dialogue_session.committed_prefix.size();
    const backend::GenerationSession base =
        extends ? session.dialogue_session : backend::reset(session.dialogue_session);
    auto step = backend::extend_session(*dialogue_, base, prompt, session.config.dialogue_params, batch_, on_chunk);
    if (step.reply.empty()) throw BackendError("dialogue model returned an empty reply");

    // Commit. Nothing above this line touched `session`.
    const std::size_t retained = (prompt.size() - 2) / 2;
    session.history.erase(session.history.begin(),
                          session.history.begin() + static_cast<std::ptrdiff_t>(session.history.size() - retained));
    session.history.push_back(Turn{std::string(user_text), step.reply});
    session.global_turn += 1;
    session.dialogue_session = std::move(step.session);

    AgentReply reply;
    reply.text = session.history.back().reply;
    reply.turn = session.global_turn;
    if (session.global_turn % session.config.assessment_cadence != 0) return reply;

    try {
        Assessment a = assess(session);
        AssessmentRecord record;
        record.at_turn = session.turn_offset + session.global_turn;
        record.timestamp = now_utc();
        record.state = a.state;
        record.evidence_window = std::move(a.evidence);
        append_assessment(session.profile, std::move(record));
        session.system_prompt = render_system_prompt(session.config.system_prompt_template, session.profile);
        reply.assessed = a.state;
        reply.recommendations = recommend(a.state, session.config.recommendations);
    } catch (const Error& e) {
        spdlog::warn("assessment at turn {} failed: {}", session.global_turn, e.what());
        reply.assessment_error = e.what();
        return reply;
    }
    if (session.profile_path) {
        try {
            save_profile(session.profile, *session.profile_path);
        } catch (const Error& e) {
            spdlog::error("cannot persist profile {}: {}", session.profile.user_id, e.what());
            reply.persist_error = e.what();
        }
    }
    return reply;
}

Assessment Orchestrator::assess(const SessionState& session) const {
    if (session.history.empty()) throw AssessmentError("no user turns to assess");
    const std::size_t window =
        std::min(session.history.size(), static_cast<std::size_t>(session.config.assessment_cadence));
    Assessment out;
    std::string merged;
    for (std::size_t i = session.history.size() - window; i < session.history.size(); ++i) {
        out.evidence.push_back(session.history[i].query);
        if (!merged.empty()) merged += '\n';
        merged += session.history[i].query;
    }
    const std::vector<ChatMessage> request{backend::system_message(session.config.assessment_prompt),
                                           backend::user_message(merged)};
    std::string last_error;
    for (int attempt = 0; attempt <= session.config.assessment_retries; ++attempt) {
        auto params = session.config.assessment_params;
        if (params.seed) params.seed = *params.seed + static_cast<std::uint64_t>(attempt);
        try {
            out.state = extract::mental_state(evaluation_->generate(request, params));
            return out;
        } catch (const ParseError& e) {
            last_error = e.what();
        } catch (const RangeError& e) {
            last_error = e.what();
        } catch (const Error& e) {
            throw AssessmentError(std::string("evaluation model failed: ") + e.what());
        }
    }
    throw AssessmentError("unusable assessment output: " + last_error);
}

}  // namespace mhagent::orchestrator
