#include "mhagent/evalbench/report.hpp"

#include <spdlog/spdlog.h>

#include <cstdio>

#include "mhagent/datapipe/parallel.hpp"
#include "mhagent/domain/errors.hpp"

namespace mhagent::evalbench {
namespace {

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

struct Column {
    std::string group;
    std::string sub;
    std::string value;
};

// Two header rows (metric group, then sub-column), one data row.
std::string render_grid(const std::string& model, const std::vector<Column>& cols) {
    std::size_t model_w = std::max<std::size_t>(model.size(), 5);
    std::vector<std::size_t> w(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
        w[i] = std::max({cols[i].sub.size(), cols[i].value.size(), std::size_t{6}});
    }
    // Widen the last column of a group whose label is wider than its columns.
    for (std::size_t i = 0; i < cols.size();) {
        std::size_t j = i;
        std::size_t span = 0;
        while (j < cols.size() && cols[j].group == cols[i].group) span += w[j++] + 1;
        if (cols[i].group.size() + 1 > span) w[j - 1] += cols[i].group.size() + 1 - span;
        i = j;
    }
    std::string groups = pad_right("", model_w) + " |";
    std::string subs = pad_right("Model", model_w) + " |";
    std::string row = pad_right(model, model_w) + " |";
    for (std::size_t i = 0; i < cols.size();) {
        std::size_t j = i;
        std::size_t span = 0;
        while (j < cols.size() && cols[j].group == cols[i].group) span += w[j++] + 1;
        groups += " " + pad_right(cols[i].group, span - 1);
        for (std::size_t k = i; k < j; ++k) {
            subs += " " + pad(cols[k].sub, w[k]);
            row += " " + pad(cols[k].value, w[k]);
        }
        i = j;
    }
    return groups + "\n" + subs + "\n" + row + "\n";
}

void add_mean(AutoScores& acc, const AutoScores& v) {
    for (std::size_t k = 0; k < AutoScores::kCount; ++k) acc.values[k] += v.values[k];
}

}  // namespace

std::vector<Turn> judge_context(const DialogueEvalRecord& record, std::size_t index) {
    std::vector<Turn> ctx;
    for (std::size_t j = 0; j < index && j < record.turns.size(); ++j) {
        const std::string& reply =
            record.strategy == Strategy::label_history ? record.turns[j].reply : record.generated.at(j);
        ctx.push_back(Turn{record.turns[j].query, reply});
    }
    return ctx;
}

ScoredDialogue score_record(DialogueEvalRecord record, backend::Backend* judge, const JudgeConfig& judge_config,
                            const BleuOptions& bleu) {
    ScoredDialogue out;
    out.record = std::move(record);
    const auto& rec = out.record;
    if (!rec.complete()) return out;
    for (std::size_t i = 0; i < rec.turns.size(); ++i) {
        out.autos.push_back(auto_scores(rec.generated[i], rec.turns[i].reply, bleu));
        if (!judge) continue;
        try {
            out.judged.push_back(
                judge_turn(judge_context(rec, i), rec.turns[i].query, rec.generated[i], *judge, judge_config));
        } catch (const Error& e) {
            spdlog::warn("turn {} of dialogue {} unscored: {}", i + 1, rec.dialogue_id.value_or("?"), e.what());
            out.judged.push_back(std::nullopt);
        }
    }
    return out;
}

StrategyReport aggregate(const std::vector<ScoredDialogue>& dialogues, const AggregateOptions& options) {
    StrategyReport r;
    r.dialogues = dialogues.size();
    AutoScores auto_sum;
    JudgeScores judge_sum;
    std::vector<std::pair<Tokens, Tokens>> pooled;
    for (const auto& d : dialogues) {
        if (!d.record.complete() || d.autos.empty()) {
            ++r.failed_dialogues;
            continue;
        }
        r.strategy = d.record.strategy;
        ++r.scored_dialogues;
        AutoScores per;
        for (const auto& a : d.autos) add_mean(per, a);
        for (auto& v : per.values) v /= static_cast<double>(d.autos.size());
        add_mean(auto_sum, per);
        if (options.pooled_bleu) {
            for (std::size_t i = 0; i < d.record.turns.size(); ++i) {
                pooled.emplace_back(char_tokenize(d.record.generated[i]), char_tokenize(d.record.turns[i].reply));
            }
        }

        JudgeScores jper;
        std::size_t judged = 0;
        for (const auto& j : d.judged) {
            if (!j) {
                ++r.unscored_turns;
                continue;
            }
            for (std::size_t k = 0; k < JudgeScores::kCount; ++k) jper.values[k] += j->values[k];
            ++judged;
        }
        if (judged > 0) {
            for (std::size_t k = 0; k < JudgeScores::kCount; ++k) {
                judge_sum.values[k] += jper.values[k] / static_cast<double>(judged);
            }
            ++r.judged_dialogues;
        }
    }
    if (r.scored_dialogues == 0) throw AggregateError("no dialogue was scored");
    for (auto& v : auto_sum.values) v /= static_cast<double>(r.scored_dialogues);
    if (options.pooled_bleu) {
        for (int n = 1; n <= 4; ++n) auto_sum.values[static_cast<std::size_t>(n - 1)] = corpus_bleu_n(pooled, n, options.bleu);
    }
    r.autos = auto_sum;
    if (r.judged_dialogues > 0) {
        for (auto& v : judge_sum.values) v /= static_cast<double>(r.judged_dialogues);
        r.judge = judge_sum;
    }
    return r;
}

DialogueRun evaluate_dialogues(const std::vector<Dialogue>& dialogues, backend::Backend& model,
                               backend::Backend* judge, Strategy strategy, const DialogueEvalConfig& eval_config,
                               const JudgeConfig& judge_config, const AggregateOptions& options, std::size_t jobs) {
    DialogueRun run;
    run.dialogues = datapipe::parallel_map(
        dialogues,
        [&](const Dialogue& d, std::size_t) {
            auto rec = eval_dialogue(d, model, strategy, eval_config);
            if (rec.error) spdlog::warn("dialogue {} excluded: {}", d.id.value_or("?"), *rec.error);
            return score_record(std::move(rec), judge, judge_config, options.bleu);
        },
        jobs);
    run.report = aggregate(run.dialogues, options);
    run.report.strategy = strategy;
    return run;
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string render_classification_table(const EvalReport& report) {
    std::vector<Column> cols;
    auto add = [&](const std::string& group, auto getter) {
        for (const char* sub : {"Dep.", "Anx."}) {
            std::string v = "-";
            if (report.classification) {
                const auto& s = std::string(sub) == "Dep." ? report.classification->depression
                                                           : report.classification->anxiety;
                v = format_fixed(getter(s), 3);
            }
            cols.push_back({group, sub, v});
        }
    };
    add("Accuracy", [](const ConditionSummary& s) { return s.accuracy; });
    add("Precision", [](const ConditionSummary& s) { return s.precision; });
    add("Recall", [](const ConditionSummary& s) { return s.recall; });
    add("F1", [](const ConditionSummary& s) { return s.f1; });
    add("Score_Norm", [](const ConditionSummary& s) { return s.score_norm; });
    return render_grid(report.model, cols);
}

std::string render_auto_table(const EvalReport& report) {
    static const std::array<const char*, 8> groups{"BLEU-1", "BLEU-2", "BLEU-3", "BLEU-4",
                                                   "ROUGE-1", "ROUGE-2", "ROUGE-L", "Total"};
    std::vector<Column> cols;
    for (std::size_t k = 0; k < groups.size(); ++k) {
        for (const auto* block : {&report.label, &report.output}) {
            std::string v = "-";
            if (*block) {
                const double x = k < AutoScores::kCount ? (*block)->autos.values[k] : (*block)->autos.total();
                v = format_fixed(100.0 * x, 2);
            }
            cols.push_back({groups[k], block == &report.label ? "Lab." : "Out.", v});
        }
    }
    return render_grid(report.model, cols);
}

std::string render_judge_table(const EvalReport& report) {
    std::vector<Column> cols;
    for (std::size_t k = 0; k <= JudgeScores::kCount; ++k) {
        const std::string group = k < JudgeScores::kCount ? JudgeScores::kNames[k] : "Total";
        for (const auto* block : {&report.label, &report.output}) {
            std::string v = "-";
            if (*block && (*block)->judge) {
                const auto& j = *(*block)->judge;
                v = format_fixed(k < JudgeScores::kCount ? j.values[k] : j.total(), 3);
            }
            cols.push_back({group, block == &report.label ? "Lab." : "Out.", v});
        }
    }
    return render_grid(report.model, cols);
}

std::string render_tables(const EvalReport& report) {
    std::string out;
    if (report.classification) {
        out += "Mental condition prediction\n" + render_classification_table(report) + "\n";
    }
    if (report.label || report.output) {
        out += "BLEU and ROUGE (x100)\n" + render_auto_table(report) + "\n";
        out += "Judge scores (0-2 per dimension, total 0-10)\n" + render_judge_table(report);
    }
    return out;
}

nlohmann::json to_json(const StrategyReport& r) {
    nlohmann::json autos = nlohmann::json::object();
    for (std::size_t k = 0; k < AutoScores::kCount; ++k) autos[AutoScores::kNames[k]] = r.autos.values[k];
    autos["Total"] = r.autos.total();
    nlohmann::json j{{"strategy", to_string(r.strategy)},
                     {"dialogues", r.dialogues},
                     {"scored_dialogues", r.scored_dialogues},
                     {"failed_dialogues", r.failed_dialogues},
                     {"judged_dialogues", r.judged_dialogues},
                     {"unscored_turns", r.unscored_turns},
                     {"auto", autos}};
    if (r.judge) {
        nlohmann::json js = nlohmann::json::object();
        for (std::size_t k = 0; k < JudgeScores::kCount; ++k) js[JudgeScores::kNames[k]] = r.judge->values[k];
        js["Total"] = r.judge->total();
        j["judge"] = js;
    } else {
        j["judge"] = nullptr;
    }
    return j;
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json j{{"model", report.model}};
    if (report.classification) {
        j["classification"] = {{"depression", to_json(report.classification->depression)},
                               {"anxiety", to_json(report.classification->anxiety)}};
    }
    if (report.label) j["label_history"] = to_json(*report.label);
    if (report.output) j["output_history"] = to_json(*report.output);
    return j;
}

nlohmann::json to_json(const ScoredDialogue& d) {
    nlohmann::json turns = nlohmann::json::array();
    for (std::size_t i = 0; i < d.record.turns.size(); ++i) {
        nlohmann::json t{{"query", d.record.turns[i].query}, {"reference", d.record.turns[i].reply}};
        if (i < d.record.generated.size()) t["generated"] = d.record.generated[i];
        if (i < d.autos.size()) t["auto"] = d.autos[i].values;
        if (i < d.judged.size()) t["judge"] = d.judged[i] ? nlohmann::json(d.judged[i]->values) : nlohmann::json(nullptr);
        turns.push_back(std::move(t));
    }
    nlohmann::json j{{"strategy", to_string(d.record.strategy)}, {"turns", turns}};
    j["id"] = d.record.dialogue_id ? nlohmann::json(*d.record.dialogue_id) : nlohmann::json(nullptr);
    if (d.record.error) j["error"] = *d.record.error;
    return j;
}

}  // namespace mhagent::evalbench
