#include <fstream>
#include <iostream>

#include "common.hpp"
#include "mhagent/datapipe/records.hpp"
#include "mhagent/domain/errors.hpp"
#include "mhagent/evalbench/report.hpp"

namespace mhagent::cli {
namespace {

using namespace mhagent::evalbench;

struct EvalOptions {
    std::string dialogues;
    std::string labels;
    std::string model_backend = "env";
    std::string judge_backend;
    std::string classifier_backend;
    std::string strategy = "both";
    std::string report = "table";
    std::string output;
    std::string details;
    std::string model_name = "model";
    bool pooled_bleu = false;
    bool no_smoothing = false;
    std::size_t jobs = 1;
    BackendOptions backend;
};

void run_eval(const EvalOptions& o) {
    if (o.dialogues.empty() && o.labels.empty()) throw InputError("give --dialogues and/or --labels");
    EvalReport report;
    report.model = o.model_name;
    auto model = open_backend(o.model_backend, o.backend);

    if (!o.labels.empty()) {
        auto classifier = o.classifier_backend.empty() ? model : open_backend(o.classifier_backend, o.backend);
        ClassificationConfig cc;
        cc.params.seed = o.backend.seed;
        cc.jobs = o.jobs;
        report.classification =
            evaluate_classification(datapipe::read_jsonl<datapipe::LabeledSample>(o.labels), *classifier, cc);
    }

    nlohmann::json details = nlohmann::json::array();
    if (!o.dialogues.empty()) {
        const auto dialogues = datapipe::read_jsonl<Dialogue>(o.dialogues);
        std::shared_ptr<backend::Backend> judge;
        if (!o.judge_backend.empty()) judge = open_backend(o.judge_backend, o.backend, true);
        DialogueEvalConfig ec;
        ec.params.seed = o.backend.seed;
        JudgeConfig jc;
        jc.params.seed = o.backend.seed;
        AggregateOptions ao;
        ao.pooled_bleu = o.pooled_bleu;
        ao.bleu.smoothing = !o.no_smoothing;

        std::vector<Strategy> strategies;
        if (o.strategy == "label" || o.strategy == "both") strategies.push_back(Strategy::label_history);
        if (o.strategy == "output" || o.strategy == "both") strategies.push_back(Strategy::output_history);
        for (Strategy s : strategies) {
            auto run = evaluate_dialogues(dialogues, *model, judge.get(), s, ec, jc, ao, o.jobs);
            for (const auto& d : run.dialogues) details.push_back(to_json(d));
            (s == Strategy::label_history ? report.label : report.output) = run.report;
        }
    }

    std::string rendered;
    if (o.report == "table") {
        rendered = render_tables(report);
    } else {
        rendered = to_json(report).dump(2) + "\n";
    }
    if (o.output.empty()) {
        std::cout << rendered;
    } else {
        std::ofstream out(o.output, std::ios::trunc);
        if (!out) throw IoError("cannot write " + o.output);
        out << rendered;
    }
    if (!o.details.empty()) {
        std::ofstream out(o.details, std::ios::trunc);
        if (!out) throw IoError("cannot write " + o.details);
        for (const auto& d : details) out << d.dump() << '\n';
    }
}

}  // namespace

void register_eval(CLI::App& app) {
    auto o = std::make_shared<EvalOptions>();
    auto* cmd = app.add_subcommand("eval", "Run the severity-prediction and multi-turn dialogue benchmark");
    cmd->add_option("--dialogues", o->dialogues, "Dialogue JSONL benchmark")->check(CLI::ExistingFile);
    cmd->add_option("--labels", o->labels, "LabeledSample JSONL benchmark")->check(CLI::ExistingFile);
    cmd->add_option("--model-backend", o->model_backend, "Model under test: URL, scripted:FILE or env");
    cmd->add_option("--classifier-backend", o->classifier_backend,
                    "Model for the severity benchmark (defaults to --model-backend)");
    cmd->add_option("--judge-backend", o->judge_backend, "Judge for the five-dimension scores");
    cmd->add_option("--strategy", o->strategy, "History strategy")->check(CLI::IsMember({"label", "output", "both"}));
    cmd->add_option("--report", o->report, "Report format")
        ->check(CLI::IsMember({"table", "machine-readable", "json"}));
    cmd->add_option("--output", o->output, "Write the report here instead of stdout");
    cmd->add_option("--details", o->details, "Per-dialogue records as JSONL");
    cmd->add_option("--model-name", o->model_name, "Row label in the tables");
    cmd->add_flag("--pooled-bleu", o->pooled_bleu, "Corpus-level BLEU instead of the per-turn mean");
    cmd->add_flag("--no-smoothing", o->no_smoothing, "Disable BLEU add-one smoothing");
    cmd->add_option("--jobs", o->jobs, "Dialogues evaluated in parallel")->check(CLI::PositiveNumber);
    add_backend_options(*cmd, o->backend);
    cmd->callback([o] { run_eval(*o); });
}

}  // namespace mhagent::cli
