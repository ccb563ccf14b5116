#include "mhagent/domain/dialogue.hpp"

#include <nlohmann/json.hpp>

#include "mhagent/domain/errors.hpp"

namespace mhagent {

void validate(const Dialogue& d, bool allow_open_last_turn) {
    if (d.turns.empty()) throw InputError("dialogue has no turns");
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
        const auto& t = d.turns[i];
        if (t.query.empty()) throw InputError("turn " + std::to_string(i + 1) + " has an empty query");
        const bool last = i + 1 == d.turns.size();
        if (t.reply.empty() && !(last && allow_open_last_turn)) {
            throw InputError("turn " + std::to_string(i + 1) + " has an empty reply");
        }
    }
}

void to_json(nlohmann::json& j, const Dialogue& d) {
    j = nlohmann::json::object();
    if (d.id) j["id"] = *d.id;
    if (d.topic) j["topic"] = *d.topic;
    auto& turns = j["turns"] = nlohmann::json::array();
    for (const auto& t : d.turns) turns.push_back({{"query", t.query}, {"reply", t.reply}});
}

void from_json(const nlohmann::json& j, Dialogue& d) {
    if (!j.is_object()) throw ParseError("dialogue", "expected an object");
    d = Dialogue{};
    if (auto it = j.find("id"); it != j.end() && !it->is_null()) {
        d.id = it->is_string() ? it->get<std::string>() : it->dump();
    }
    if (auto it = j.find("topic"); it != j.end() && it->is_string()) d.topic = it->get<std::string>();
    auto it = j.find("turns");
    if (it == j.end() || !it->is_array()) throw ParseError("turns", "missing or not an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& t = (*it)[i];
        const std::string where = "turns[" + std::to_string(i) + "]";
        if (!t.is_object() || !t.contains("query") || !t["query"].is_string()) {
            throw ParseError(where + ".query", "missing or not a string");
        }
        Turn turn;
        turn.query = t["query"].get<std::string>();
        if (t.contains("reply")) {
            if (!t["reply"].is_string()) throw ParseError(where + ".reply", "not a string");
            turn.reply = t["reply"].get<std::string>();
        }
        d.turns.push_back(std::move(turn));
    }
}

}  // namespace mhagent
