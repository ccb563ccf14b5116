#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mhagent/evalbench/classification.hpp"
#include "mhagent/evalbench/dialogue_eval.hpp"
#include "mhagent/evalbench/metrics.hpp"

namespace mhagent::evalbench {

struct ScoredDialogue {
    DialogueEvalRecord record;
    std::vector<AutoScores> autos;                   // one per turn, empty if the record is incomplete
    std::vector<std::optional<JudgeScores>> judged;  // one per turn when a judge ran; nullopt = unscored
};

// Context shown to the judge for turn `index`: the history the model saw.
std::vector<Turn> judge_context(const DialogueEvalRecord& record, std::size_t index);

ScoredDialogue score_record(DialogueEvalRecord record, backend::Backend* judge, const JudgeConfig& judge_config = {},
                            const BleuOptions& bleu = {});

struct AggregateOptions {
    // Pool BLEU counts over every turn instead of averaging per turn.
    bool pooled_bleu = false;
    BleuOptions bleu;
};

struct StrategyReport {
    Strategy strategy = Strategy::label_history;
    std::size_t dialogues = 0;
    std::size_t scored_dialogues = 0;
    std::size_t failed_dialogues = 0;
    std::size_t judged_dialogues = 0;
    std::size_t unscored_turns = 0;
    AutoScores autos;
    std::optional<JudgeScores> judge;
};

// Per-dialogue means over turns, then the mean over dialogues. Incomplete
// records are left out; dialogues without any judged turn are left out of
// the judge block only. Throws AggregateError when nothing was scored.
StrategyReport aggregate(const std::vector<ScoredDialogue>& dialogues, const AggregateOptions& options = {});

struct DialogueRun {
    StrategyReport report;
    std::vector<ScoredDialogue> dialogues;
};

// Runs eval_dialogue and scoring over a corpus, up to `jobs` dialogues at a
// time; turns within one dialogue stay sequential.
DialogueRun evaluate_dialogues(const std::vector<Dialogue>& dialogues, backend::Backend& model,
                               backend::Backend* judge, Strategy strategy, const DialogueEvalConfig& eval_config = {},
                               const JudgeConfig& judge_config = {}, const AggregateOptions& options = {},
                               std::size_t jobs = 1);

struct EvalReport {
    std::string model;
    std::optional<ClassificationResult> classification;
    std::optional<StrategyReport> label;
    std::optional<StrategyReport> output;
};

// Fixed-point text with round-half-to-even on the stored binary value.
std::string format_fixed(double value, int decimals);

// Accuracy / Precision / Recall / F1 / Score_Norm, each split Dep. | Anx.
std::string render_classification_table(const EvalReport& report);
// B-1..B-4, R-1, R-2, R-L, Total, each split Lab. | Out., scaled by 100.
std::string render_auto_table(const EvalReport& report);
// Understanding .. Safety, Total, each split Lab. | Out.
std::string render_judge_table(const EvalReport& report);
std::string render_tables(const EvalReport& report);

nlohmann::json to_json(const StrategyReport& r);
nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const ScoredDialogue& d);

}  // namespace mhagent::evalbench
