#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mhagent/datapipe/records.hpp"
#include "mhagent/domain/dialogue.hpp"

namespace mhagent::datapipe {

// Rows are depression levels, columns anxiety levels.
struct SeverityTable {
    std::array<std::array<std::size_t, 4>, 4> counts{};

    std::array<std::size_t, 4> row_sums() const;
    std::array<std::size_t, 4> col_sums() const;
    std::size_t total() const;
};

SeverityTable severity_table(const std::vector<LabeledSample>& samples);

struct DialogueStats {
    std::size_t dialogues = 0;
    std::size_t turns = 0;
    double mean_turns = 0.0;
    double mean_tokens_per_turn = 0.0;
    double mean_tokens_per_question = 0.0;
    double mean_tokens_per_answer = 0.0;
};

// Token counts use backend::estimate_tokens on the raw text (no message
// overhead). Per-turn means are over all turns of all dialogues.
DialogueStats dialogue_stats(const std::vector<Dialogue>& dialogues);

std::string render_severity_table(const SeverityTable& table);
std::string render_dialogue_stats(const DialogueStats& stats);

nlohmann::json to_json(const SeverityTable& table);
nlohmann::json to_json(const DialogueStats& stats);

}  // namespace mhagent::datapipe
