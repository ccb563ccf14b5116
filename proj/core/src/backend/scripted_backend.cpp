#include "mhagent/backend/scripted_backend.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/text.hpp"

namespace mhagent::backend {

using nlohmann::json;

Script script_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("script", "expected an object");
    Script s;
    if (auto it = j.find("default"); it != j.end()) {
        if (!it->is_string()) throw ParseError("default", "expected a string");
        s.fallback = it->get<std::string>();
    }
    if (auto it = j.find("chunk_chars"); it != j.end()) {
        if (!it->is_number_integer() || it->get<long long>() < 1) {
            throw ParseError("chunk_chars", "expected a positive integer");
        }
        s.chunk_chars = it->get<std::size_t>();
    }
    if (auto it = j.find("rules"); it != j.end()) {
        if (!it->is_array()) throw ParseError("rules", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& r = (*it)[i];
            const std::string where = "rules[" + std::to_string(i) + "]";
            if (!r.is_object()) throw ParseError(where, "expected an object");
            ScriptRule rule;
            if (r.contains("match")) {
                rule.match = ScriptRule::Match::exact;
                rule.pattern = r.at("match").get<std::string>();
            } else if (r.contains("contains")) {
                rule.match = ScriptRule::Match::contains;
                rule.pattern = r.at("contains").get<std::string>();
            } else {
                rule.match = ScriptRule::Match::any;
            }
            if (r.contains("system_contains")) rule.system_contains = r.at("system_contains").get<std::string>();
            if (r.contains("reply")) rule.replies.push_back(r.at("reply").get<std::string>());
            if (r.contains("replies")) {
                for (const auto& x : r.at("replies")) rule.replies.push_back(x.get<std::string>());
            }
            if (r.contains("error")) rule.error = r.at("error").get<std::string>();
            if (rule.replies.empty() && !rule.error) {
                throw ParseError(where, "rule needs \"reply\", \"replies\" or \"error\"");
            }
            s.rules.push_back(std::move(rule));
        }
    }
    return s;
}

Script load_script(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open script " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return script_from_json(json::parse(buf.str()));
    } catch (const json::exception& e) {
        throw ParseError(path.string(), e.what());
    }
}

std::vector<std::string> split_chunks(std::string_view text, std::size_t chunk_chars) {
    std::vector<std::string> out;
    if (text.empty()) return out;
    if (chunk_chars == 0) chunk_chars = 1;
    const std::u32string cps = text::decode_utf8(text);
    for (std::size_t i = 0; i < cps.size(); i += chunk_chars) {
        out.push_back(text::encode_utf8(std::u32string_view(cps).substr(i, chunk_chars)));
    }
    return out;
}

ScriptedBackend::ScriptedBackend(Script script, std::string name)
    : script_(std::move(script)), chunk_chars_(script_.chunk_chars), name_(std::move(name)) {}

ScriptedBackend::ScriptedBackend(Responder responder, std::size_t chunk_chars, std::string name)
    : responder_(std::move(responder)), chunk_chars_(chunk_chars), name_(std::move(name)) {}

std::string ScriptedBackend::respond(std::span<const ChatMessage> messages,
                                     const GenerationParams& params) const {
    if (responder_) return responder_(messages);

    const std::string_view user = last_user_content(messages);
    std::string system;
    for (const auto& m : messages) {
        if (m.role == Role::system) system += m.content;
    }
    for (const auto& rule : script_.rules) {
        bool hit = false;
        switch (rule.match) {
            case ScriptRule::Match::exact: hit = user == rule.pattern; break;
            case ScriptRule::Match::contains: hit = user.find(rule.pattern) != std::string_view::npos; break;
            case ScriptRule::Match::any: hit = true; break;
        }
        if (hit && rule.system_contains) hit = system.find(*rule.system_contains) != std::string::npos;
        if (!hit) continue;
        if (rule.error) throw BackendError(*rule.error);
        if (rule.replies.size() == 1) return rule.replies.front();
        std::uint64_t h = text::fnv1a64(std::to_string(params.seed.value_or(0)));
        for (const auto& m : messages) h = text::fnv1a64(m.content, h);
        return rule.replies[h % rule.replies.size()];
    }
    if (script_.fallback) return *script_.fallback;
    throw BackendError("no scripted reply for '" + std::string(user) + "'");
}

std::string ScriptedBackend::generate(std::span<const ChatMessage> messages,
                                      const GenerationParams& params) {
    validate_request(messages);
    validate(params);
    {
        std::lock_guard lock(mu_);
        calls_.emplace_back(messages.begin(), messages.end());
    }
    return respond(messages, params);
}

std::string ScriptedBackend::generate_stream(std::span<const ChatMessage> messages,
                                             const GenerationParams& params, const ChunkSink& on_chunk) {
    std::string text = generate(messages, params);
    if (on_chunk) {
        for (const auto& chunk : split_chunks(text, chunk_chars_)) on_chunk(chunk);
    }
    return text;
}

std::vector<std::vector<ChatMessage>> ScriptedBackend::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

std::size_t ScriptedBackend::call_count() const {
    std::lock_guard lock(mu_);
    return calls_.size();
}

}  // namespace mhagent::backend
