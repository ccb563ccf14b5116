#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mhagent {

// One client query and the counselor reply to it.
struct Turn {
    std::string query;
    std::string reply;

    friend bool operator==(const Turn&, const Turn&) = default;
};

struct Dialogue {
    std::optional<std::string> id;
    std::optional<std::string> topic;
    std::vector<Turn> turns;

    friend bool operator==(const Dialogue&, const Dialogue&) = default;
};

// Throws InputError when the dialogue has no turns or an empty query.
// Replies may be empty only when `allow_open_last_turn` and only on the last turn.
void validate(const Dialogue& d, bool allow_open_last_turn = false);

// {"id":..., "topic":..., "turns":[{"query":..., "reply":...}, ...]}
void to_json(nlohmann::json& j, const Dialogue& d);
void from_json(const nlohmann::json& j, Dialogue& d);

}  // namespace mhagent
