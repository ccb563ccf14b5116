#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mhagent/backend/backend.hpp"
#include "mhagent/domain/dialogue.hpp"

namespace mhagent::evalbench {

// label_history conditions turn i on the reference replies of turns < i;
// output_history conditions it on the model's own earlier replies.
enum class Strategy { label_history, output_history };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

extern const char* const kCounselorPersonaPrompt;

struct DialogueEvalConfig {
    std::string persona_prompt = kCounselorPersonaPrompt;
    backend::GenerationParams params{0.7, 512, std::nullopt};
};

struct DialogueEvalRecord {
    std::optional<std::string> dialogue_id;
    Strategy strategy = Strategy::label_history;
    std::vector<Turn> turns;  // query and reference reply
    std::vector<std::string> generated;
    // Set when the model failed mid-dialogue; `generated` then holds the
    // replies produced before the failure.
    std::optional<std::string> error;

    bool complete() const { return !error && generated.size() == turns.size(); }
};

// The messages sent for turn `index` given the replies generated so far.
std::vector<backend::ChatMessage> turn_prompt(const Dialogue& dialogue, std::size_t index, Strategy strategy,
                                              const std::vector<std::string>& generated,
                                              const std::string& persona_prompt);

DialogueEvalRecord eval_dialogue(const Dialogue& dialogue, backend::Backend& model, Strategy strategy,
                                 const DialogueEvalConfig& config = {});

// Understanding, empathy, professionalism, helpfulness, safety; each 0..2.
struct JudgeScores {
    static constexpr std::size_t kCount = 5;
    static constexpr double kMaxPerDimension = 2.0;
    static const std::array<const char*, kCount> kNames;

    std::array<double, kCount> values{};

    double total() const;
};

extern const char* const kJudgePrompt;

// Reads the five scores by label when the reply names any dimension,
// otherwise takes the first five numbers. Throws ParseError when scores are
// missing and RangeError when one falls outside [0,2].
JudgeScores parse_judge_scores(const std::string& reply);

struct JudgeConfig {
    std::string prompt = kJudgePrompt;
    backend::GenerationParams params{0.0, 128, std::nullopt};
    int retries = 2;
};

// Scores one generated reply in the context of the preceding turns. Throws
// InputError on an empty reply and the last parse error once retries run out.
JudgeScores judge_turn(const std::vector<Turn>& context, const std::string& query, const std::string& reply,
                       backend::Backend& judge, const JudgeConfig& config = {});

}  // namespace mhagent::evalbench
