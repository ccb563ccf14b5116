#include "mhagent/evalbench/classification.hpp"

#include <cstdlib>

#include "mhagent/datapipe/parallel.hpp"
#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/extract.hpp"
#include "mhagent/orchestrator/agent.hpp"

namespace mhagent::evalbench {

std::array<std::size_t, 4> ConfusionMatrix::supports() const {
    std::array<std::size_t, 4> out{};
    for (std::size_t t = 0; t < 4; ++t) {
        for (std::size_t p = 0; p < 4; ++p) out[t] += counts[t][p];
    }
    return out;
}

std::size_t ConfusionMatrix::total() const {
    std::size_t n = 0;
    for (auto s : supports()) n += s;
    return n;
}

ConfusionMatrix confusion(std::span<const SeverityLevel> truth, std::span<const SeverityLevel> pred) {
    if (truth.size() != pred.size()) throw InputError("truth and prediction lengths differ");
    if (truth.empty()) throw InputError("no samples");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++cm.counts[static_cast<std::size_t>(truth[i].value())][static_cast<std::size_t>(pred[i].value())];
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const std::size_t n = cm.total();
    if (n == 0) throw InputError("empty confusion matrix");
    std::size_t diag = 0;
    for (std::size_t k = 0; k < 4; ++k) diag += cm.counts[k][k];
    return static_cast<double>(diag) / static_cast<double>(n);
}

double weighted_metric(const ConfusionMatrix& cm, MetricKind kind) {
    const auto support = cm.supports();
    const std::size_t n = cm.total();
    if (n == 0) throw InputError("empty confusion matrix");
    double acc = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        if (support[k] == 0) continue;
        const auto tp = static_cast<double>(cm.counts[k][k]);
        std::size_t predicted = 0;
        for (std::size_t t = 0; t < 4; ++t) predicted += cm.counts[t][k];
        const double p = predicted ? tp / static_cast<double>(predicted) : 0.0;
        const double r = tp / static_cast<double>(support[k]);
        double m = 0.0;
        switch (kind) {
            case MetricKind::precision: m = p; break;
            case MetricKind::recall: m = r; break;
            case MetricKind::f1: m = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; break;
        }
        acc += static_cast<double>(support[k]) * m;
    }
    return acc / static_cast<double>(n);
}

double norm_score(SeverityLevel pred, SeverityLevel truth, int m) {
    if (m < SeverityLevel::kMax - SeverityLevel::kMin) throw InputError("normalizer smaller than the largest error");
    return 1.0 - static_cast<double>(std::abs(pred.value() - truth.value())) / static_cast<double>(m);
}

ConditionSummary summarize(std::span<const SeverityLevel> truth, std::span<const std::optional<SeverityLevel>> pred) {
    if (truth.size() != pred.size()) throw InputError("truth and prediction lengths differ");
    if (truth.empty()) throw InputError("no samples");
    ConditionSummary s;
    s.samples = truth.size();
    std::vector<SeverityLevel> vt, vp;
    std::size_t correct = 0;
    double norm = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!pred[i]) {
            ++s.invalid;
            continue;
        }
        vt.push_back(truth[i]);
        vp.push_back(*pred[i]);
        correct += *pred[i] == truth[i];
        norm += norm_score(*pred[i], truth[i]);
    }
    const auto n = static_cast<double>(s.samples);
    s.accuracy = static_cast<double>(correct) / n;
    s.score_norm = norm / n;
    if (!vt.empty()) {
        const auto cm = confusion(vt, vp);
        s.precision = weighted_metric(cm, MetricKind::precision);
        s.recall = weighted_metric(cm, MetricKind::recall);
        s.f1 = weighted_metric(cm, MetricKind::f1);
    }
    return s;
}

ClassificationResult evaluate_classification(const std::vector<datapipe::LabeledSample>& samples,
                                             backend::Backend& model, const ClassificationConfig& config) {
    if (samples.empty()) throw InputError("no labeled samples to evaluate");
    const std::string prompt = config.prompt.empty() ? orchestrator::kDefaultAssessmentPrompt : config.prompt;
    struct Outcome {
        std::optional<MentalState> state;
        std::string error;
    };
    auto outcomes = datapipe::parallel_map(
        samples,
        [&](const datapipe::LabeledSample& s, std::size_t) {
            const std::vector<backend::ChatMessage> request{backend::system_message(prompt),
                                                            backend::user_message(s.question)};
            Outcome o;
            try {
                o.state = extract::mental_state(model.generate(request, config.params));
            } catch (const Error& e) {
                o.error = e.what();
            }
            return o;
        },
        config.jobs);

    ClassificationResult r;
    std::vector<SeverityLevel> dep_t, anx_t;
    std::vector<std::optional<SeverityLevel>> dep_p, anx_p;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        dep_t.push_back(samples[i].state.depression);
        anx_t.push_back(samples[i].state.anxiety);
        const auto& st = outcomes[i].state;
        dep_p.push_back(st ? std::optional(st->depression) : std::nullopt);
        anx_p.push_back(st ? std::optional(st->anxiety) : std::nullopt);
        r.predictions.push_back(st);
        r.errors.push_back(outcomes[i].error);
    }
    r.depression = summarize(dep_t, dep_p);
    r.anxiety = summarize(anx_t, anx_p);
    return r;
}

nlohmann::json to_json(const ConditionSummary& s) {
    return nlohmann::json{{"samples", s.samples},   {"invalid", s.invalid}, {"accuracy", s.accuracy},
                          {"precision", s.precision}, {"recall", s.recall},   {"f1", s.f1},
                          {"score_norm", s.score_norm}};
}

}  // namespace mhagent::evalbench
