#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mhagent/backend/backend.hpp"
#include "mhagent/datapipe/records.hpp"
#include "mhagent/domain/severity.hpp"

namespace mhagent::evalbench {

// counts[true][predicted]
struct ConfusionMatrix {
    std::array<std::array<std::size_t, 4>, 4> counts{};

    std::array<std::size_t, 4> supports() const;
    std::size_t total() const;
};

// Throws InputError on a length mismatch or empty input.
ConfusionMatrix confusion(std::span<const SeverityLevel> truth, std::span<const SeverityLevel> pred);

enum class MetricKind { precision, recall, f1 };

double accuracy(const ConfusionMatrix& cm);
// Per-class metric (0/0 taken as 0) averaged with true-class supports as
// weights. Throws InputError on an empty matrix.
double weighted_metric(const ConfusionMatrix& cm, MetricKind kind);

// 1 - |pred - truth| / m
double norm_score(SeverityLevel pred, SeverityLevel truth, int m = 3);

struct ConditionSummary {
    std::size_t samples = 0;
    std::size_t invalid = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double score_norm = 0.0;
};

// An absent prediction counts as wrong for accuracy and scores 0 for the
// normalized score; precision, recall and F1 use the valid predictions only.
ConditionSummary summarize(std::span<const SeverityLevel> truth, std::span<const std::optional<SeverityLevel>> pred);

struct ClassificationResult {
    ConditionSummary depression;
    ConditionSummary anxiety;
    std::vector<std::optional<MentalState>> predictions;
    std::vector<std::string> errors;  // empty string when the prediction parsed
};

struct ClassificationConfig {
    std::string prompt;  // defaults to the orchestrator assessment prompt when empty
    backend::GenerationParams params{0.0, 64, std::nullopt};
    std::size_t jobs = 1;
};

ClassificationResult evaluate_classification(const std::vector<datapipe::LabeledSample>& samples,
                                             backend::Backend& model, const ClassificationConfig& config = {});

nlohmann::json to_json(const ConditionSummary& s);

}  // namespace mhagent::evalbench
