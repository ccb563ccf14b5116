#include "mhagent/datapipe/stats.hpp"

#include <cstdio>

#include "mhagent/backend/token_estimate.hpp"
#include "mhagent/domain/severity.hpp"

namespace mhagent::datapipe {
namespace {

const std::array<const char*, 4> kLevelNames{"Minimal", "Mild", "Moderate", "Severe"};

std::string cell(const std::string& s, int width) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%*s", width, s.c_str());
    return buf;
}

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::array<std::size_t, 4> SeverityTable::row_sums() const {
    std::array<std::size_t, 4> out{};
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) out[r] += counts[r][c];
    }
    return out;
}

std::array<std::size_t, 4> SeverityTable::col_sums() const {
    std::array<std::size_t, 4> out{};
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) out[c] += counts[r][c];
    }
    return out;
}

std::size_t SeverityTable::total() const {
    std::size_t t = 0;
    for (auto v : row_sums()) t += v;
    return t;
}

SeverityTable severity_table(const std::vector<LabeledSample>& samples) {
    SeverityTable t;
    for (const auto& s : samples) {
        ++t.counts[static_cast<std::size_t>(s.state.depression.value())][static_cast<std::size_t>(s.state.anxiety.value())];
    }
    return t;
}

DialogueStats dialogue_stats(const std::vector<Dialogue>& dialogues) {
    DialogueStats s;
    s.dialogues = dialogues.size();
    std::size_t q_tokens = 0;
    std::size_t a_tokens = 0;
    for (const auto& d : dialogues) {
        s.turns += d.turns.size();
        for (const auto& t : d.turns) {
            q_tokens += backend::estimate_tokens(t.query);
            a_tokens += backend::estimate_tokens(t.reply);
        }
    }
    if (s.dialogues > 0) s.mean_turns = static_cast<double>(s.turns) / static_cast<double>(s.dialogues);
    if (s.turns > 0) {
        const auto n = static_cast<double>(s.turns);
        s.mean_tokens_per_question = static_cast<double>(q_tokens) / n;
        s.mean_tokens_per_answer = static_cast<double>(a_tokens) / n;
        s.mean_tokens_per_turn = static_cast<double>(q_tokens + a_tokens) / n;
    }
    return s;
}

std::string render_severity_table(const SeverityTable& table) {
    constexpr int w = 10;
    std::string out = cell("Dep\\Anx", w);
    for (const char* n : kLevelNames) out += cell(n, w);
    out += cell("Sum", w) + "\n";
    const auto rows = table.row_sums();
    for (std::size_t r = 0; r < 4; ++r) {
        out += cell(kLevelNames[r], w);
        for (std::size_t c = 0; c < 4; ++c) out += cell(std::to_string(table.counts[r][c]), w);
        out += cell(std::to_string(rows[r]), w) + "\n";
    }
    out += cell("Sum", w);
    for (auto v : table.col_sums()) out += cell(std::to_string(v), w);
    out += cell(std::to_string(table.total()), w) + "\n";
    return out;
}

std::string render_dialogue_stats(const DialogueStats& s) {
    std::string out;
    out += "Dialogues                      " + std::to_string(s.dialogues) + "\n";
    out += "Average turns per dialogue     " + fixed2(s.mean_turns) + "\n";
    out += "Average tokens per turn        " + fixed2(s.mean_tokens_per_turn) + "\n";
    out += "Average tokens per question    " + fixed2(s.mean_tokens_per_question) + "\n";
    out += "Average tokens per answer      " + fixed2(s.mean_tokens_per_answer) + "\n";
    return out;
}

nlohmann::json to_json(const SeverityTable& table) {
    nlohmann::json j;
    j["counts"] = table.counts;
    j["row_sums"] = table.row_sums();
    j["col_sums"] = table.col_sums();
    j["total"] = table.total();
    j["levels"] = {"minimal", "mild", "moderate", "severe"};
    return j;
}

nlohmann::json to_json(const DialogueStats& s) {
    return nlohmann::json{{"dialogues", s.dialogues},
                          {"turns", s.turns},
                          {"mean_turns", s.mean_turns},
                          {"mean_tokens_per_turn", s.mean_tokens_per_turn},
                          {"mean_tokens_per_question", s.mean_tokens_per_question},
                          {"mean_tokens_per_answer", s.mean_tokens_per_answer}};
}

}  // namespace mhagent::datapipe
