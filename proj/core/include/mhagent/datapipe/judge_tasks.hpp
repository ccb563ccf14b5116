#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mhagent/backend/backend.hpp"
#include "mhagent/datapipe/parallel.hpp"
#include "mhagent/datapipe/records.hpp"
#include "mhagent/domain/dialogue.hpp"

namespace mhagent::datapipe {

extern const char* const kLabelingPrompt;
extern const char* const kSynthesisPrompt;
extern const char* const kQualityPrompt;

struct LabelConfig {
    std::size_t min_question_chars = 200;  // strictly more is required
    int retries = 2;
    std::string prompt = kLabelingPrompt;
    backend::GenerationParams params{0.0, 64, std::nullopt};
};

// Throws InputError when the question is too short and LabelError when no
// in-range pair of scores came back after the retries.
LabeledSample label_sample(const std::string& question, backend::Backend& judge, const LabelConfig& config = {});

struct SynthesisConfig {
    std::size_t turns = 5;
    std::string prompt = kSynthesisPrompt;
    backend::GenerationParams params{0.2, 350, std::nullopt};
};

// Splits a transcript into query/reply turns. Accepts speaker-tagged lines
// ("Client: ...", "Counselor: ...", "来访者：...", "咨询师：...") with
// continuation lines, or a JSON array of {"query","reply"} objects.
std::vector<Turn> parse_transcript(const std::string& text);

// Throws SynthesisError unless the judge produced exactly `turns` turns.
Dialogue synthesize_dialogue(const QaPair& pair, backend::Backend& judge, const SynthesisConfig& config = {});

enum class Verdict { accept, reject };

// Earliest verdict keyword wins; "unacceptable" and "不合格" read as reject.
std::optional<Verdict> parse_verdict(const std::string& reply);

struct QualityRecord {
    std::size_t index = 0;
    std::string prompt_hash;
    std::string input;
    std::string verdict;  // "accept", "reject" or "unfiltered"
    std::string reply;
    std::optional<std::string> error;
};

void to_json(nlohmann::json& j, const QualityRecord& r);

struct QualityConfig {
    std::string prompt = kQualityPrompt;
    backend::GenerationParams params{0.0, 32, std::nullopt};
};

std::string render_for_quality(const QaPair& pair);
std::string render_for_quality(const Dialogue& dialogue);

template <typename T>
struct QualityResult {
    std::vector<T> kept;
    std::vector<QualityRecord> records;
    std::size_t rejected = 0;
    std::size_t unfiltered = 0;
};

// Asks the judge about one rendered item. Judge failures and unreadable
// verdicts yield "unfiltered", which keeps the item.
QualityRecord judge_quality(const std::string& rendered, std::size_t index, backend::Backend& judge,
                            const QualityConfig& config);

template <typename T>
QualityResult<T> quality_filter(const std::vector<T>& items, backend::Backend& judge, const QualityConfig& config = {},
                                std::size_t jobs = 1) {
    auto records = parallel_map(
        items, [&](const T& item, std::size_t i) { return judge_quality(render_for_quality(item), i, judge, config); },
        jobs);
    QualityResult<T> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto& rec = records[i];
        if (rec.verdict == "reject") {
            ++out.rejected;
        } else {
            if (rec.verdict == "unfiltered") ++out.unfiltered;
            out.kept.push_back(items[i]);
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

}  // namespace mhagent::datapipe
