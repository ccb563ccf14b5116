#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>

#include "common.hpp"
#include "mhagent/datapipe/dedup.hpp"
#include "mhagent/datapipe/judge_tasks.hpp"
#include "mhagent/datapipe/parallel.hpp"
#include "mhagent/datapipe/records.hpp"
#include "mhagent/datapipe/stats.hpp"
#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/text.hpp"

namespace mhagent::cli {
namespace {

using namespace mhagent::datapipe;

struct StageOptions {
    std::string input;
    std::string output;
    std::string judge_backend;
    std::size_t jobs = 1;
    BackendOptions backend;
};

void add_stage_options(CLI::App& cmd, StageOptions& o, bool needs_judge) {
    cmd.add_option("--input", o.input, "Input JSONL file")->required()->check(CLI::ExistingFile);
    cmd.add_option("--output", o.output, "Output JSONL file")->required();
    auto* judge = cmd.add_option("--judge-backend", o.judge_backend, "URL, scripted:FILE or env");
    if (needs_judge) judge->required();
    cmd.add_option("--jobs", o.jobs, "Parallel judge calls")->check(CLI::PositiveNumber);
    add_backend_options(cmd, o.backend);
}

template <typename T>
void write_quality_log(const std::string& output, const QualityResult<T>& q) {
    std::ofstream out(output + ".quality.jsonl", std::ios::trunc);
    for (const auto& r : q.records) out << nlohmann::json(r).dump() << '\n';
}

struct PrepOptions : StageOptions {
    std::size_t min_question = 50;
    std::size_t min_answer = 100;
};

void run_prep(const PrepOptions& o) {
    const auto pairs = read_jsonl<QaPair>(o.input);
    auto kept = length_filter(pairs, o.min_question, o.min_answer);
    auto manifest = manifest_base("prep", o.backend);
    manifest["input"] = o.input;
    manifest["params"] = {{"min_question_chars", o.min_question}, {"min_answer_chars", o.min_answer}};
    manifest["counts"] = {{"input", pairs.size()}, {"after_length_filter", kept.size()}};
    if (!o.judge_backend.empty()) {
        auto judge = open_backend(o.judge_backend, o.backend, true);
        QualityConfig qc;
        qc.params.seed = o.backend.seed;
        const auto q = quality_filter(kept, *judge, qc, o.jobs);
        write_quality_log(o.output, q);
        manifest["quality_filter"] = {{"prompt", qc.prompt},
                                      {"temperature", qc.params.temperature},
                                      {"max_tokens", qc.params.max_tokens},
                                      {"rejected", q.rejected},
                                      {"unfiltered", q.unfiltered}};
        kept = q.kept;
    }
    manifest["counts"]["output"] = kept.size();
    write_jsonl(o.output, kept);
    write_manifest(o.output, manifest);
    std::cout << "prep: " << pairs.size() << " in, " << kept.size() << " out\n";
}

struct DedupOptions : StageOptions {
    LshConfig lsh;
    std::string key = "question_answer";
};

void add_lsh_options(CLI::App& cmd, LshConfig& lsh) {
    cmd.add_option("--threshold", lsh.threshold, "Estimated Jaccard at which two texts are duplicates")
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--permutations", lsh.permutations, "MinHash permutations");
    cmd.add_option("--bands", lsh.bands, "LSH bands");
    cmd.add_option("--rows", lsh.rows, "Rows per band");
    cmd.add_option("--shingle", lsh.shingle_k, "Character shingle size");
}

nlohmann::json lsh_json(const LshConfig& c, const std::string& key) {
    return {{"threshold", c.threshold}, {"permutations", c.permutations}, {"bands", c.bands},
            {"rows", c.rows},           {"shingle_k", c.shingle_k},       {"seed", c.seed},
            {"key", key}};
}

void run_dedup(DedupOptions o) {
    o.lsh.key = dedup_key_from_string(o.key);
    if (o.backend.seed) o.lsh.seed = *o.backend.seed;
    const auto pairs = read_jsonl<QaPair>(o.input);
    const auto r = lsh_dedup(pairs, o.lsh);
    write_jsonl(o.output, r.kept);
    auto manifest = manifest_base("dedup", o.backend);
    manifest["input"] = o.input;
    manifest["params"] = lsh_json(o.lsh, o.key);
    manifest["counts"] = {{"input", pairs.size()}, {"kept", r.kept.size()}, {"removed", r.removed_count}};
    write_manifest(o.output, manifest);
    std::cout << "dedup: " << pairs.size() << " in, " << r.kept.size() << " kept, " << r.removed_count
              << " removed\n";
}

struct LabelOptions : StageOptions {
    std::size_t min_chars = 200;
    bool no_dedup = false;
    LshConfig lsh;
};

void run_label(LabelOptions o) {
    const auto pairs = read_jsonl<QaPair>(o.input);
    std::vector<QaPair> longq;
    for (const auto& p : pairs) {
        if (text::char_count(p.question) > o.min_chars) longq.push_back(p);
    }
    std::vector<QaPair> candidates = longq;
    if (!o.no_dedup) {
        o.lsh.key = DedupKey::question;
        if (o.backend.seed) o.lsh.seed = *o.backend.seed;
        candidates = lsh_dedup(longq, o.lsh).kept;
    }

    auto judge = open_backend(o.judge_backend, o.backend, true);
    LabelConfig lc;
    lc.min_question_chars = o.min_chars;
    lc.params.seed = o.backend.seed;
    struct Outcome {
        std::optional<LabeledSample> sample;
        std::string error;
    };
    const auto outcomes = parallel_map(
        candidates,
        [&](const QaPair& p, std::size_t i) {
            Outcome out;
            try {
                out.sample = label_sample(p.question, *judge, lc);
            } catch (const Error& e) {
                spdlog::warn("sample {} skipped: {}", i, e.what());
                out.error = e.what();
            }
            return out;
        },
        o.jobs);
    std::vector<LabeledSample> labeled;
    for (const auto& oc : outcomes) {
        if (oc.sample) labeled.push_back(*oc.sample);
    }
    write_jsonl(o.output, labeled);

    auto manifest = manifest_base("label", o.backend);
    manifest["input"] = o.input;
    manifest["params"] = {{"min_question_chars_exclusive", o.min_chars},
                          {"dedup", o.no_dedup ? nlohmann::json(nullptr) : lsh_json(o.lsh, "question")},
                          {"prompt", lc.prompt},
                          {"temperature", lc.params.temperature},
                          {"max_tokens", lc.params.max_tokens},
                          {"retries", lc.retries}};
    manifest["counts"] = {{"input", pairs.size()},
                          {"long_enough", longq.size()},
                          {"after_dedup", candidates.size()},
                          {"labeled", labeled.size()},
                          {"skipped", candidates.size() - labeled.size()}};
    write_manifest(o.output, manifest);
    std::cout << "label: " << labeled.size() << " labeled, " << candidates.size() - labeled.size() << " skipped\n";
}

struct SynthOptions : StageOptions {
    bool no_quality_filter = false;
};

void run_synth(const SynthOptions& o) {
    const auto pairs = read_jsonl<QaPair>(o.input);
    auto judge = open_backend(o.judge_backend, o.backend, true);
    SynthesisConfig sc;
    sc.params.seed = o.backend.seed;
    const auto outcomes = parallel_map(
        pairs,
        [&](const QaPair& p, std::size_t i) -> std::optional<Dialogue> {
            try {
                return synthesize_dialogue(p, *judge, sc);
            } catch (const Error& e) {
                spdlog::warn("pair {} skipped: {}", i, e.what());
                return std::nullopt;
            }
        },
        o.jobs);
    std::vector<Dialogue> dialogues;
    for (const auto& d : outcomes) {
        if (d) dialogues.push_back(*d);
    }
    const std::size_t synthesized = dialogues.size();

    auto manifest = manifest_base("synth", o.backend);
    manifest["input"] = o.input;
    manifest["params"] = {{"prompt", sc.prompt},
                          {"temperature", sc.params.temperature},
                          {"max_tokens", sc.params.max_tokens},
                          {"turns", sc.turns}};
    if (!o.no_quality_filter) {
        QualityConfig qc;
        qc.params.seed = o.backend.seed;
        const auto q = quality_filter(dialogues, *judge, qc, o.jobs);
        write_quality_log(o.output, q);
        manifest["quality_filter"] = {{"prompt", qc.prompt}, {"rejected", q.rejected}, {"unfiltered", q.unfiltered}};
        dialogues = q.kept;
    }
    manifest["counts"] = {{"input", pairs.size()},
                          {"synthesized", synthesized},
                          {"skipped", pairs.size() - synthesized},
                          {"output", dialogues.size()}};
    write_jsonl(o.output, dialogues);
    write_manifest(o.output, manifest);
    std::cout << "synth: " << synthesized << " synthesized, " << dialogues.size() << " kept\n";
}

struct StatsOptions {
    std::string labels;
    std::string dialogues;
    std::string format = "table";
};

void run_stats(const StatsOptions& o) {
    if (o.labels.empty() && o.dialogues.empty()) throw InputError("give --labels and/or --dialogues");
    nlohmann::json j = nlohmann::json::object();
    if (!o.labels.empty()) {
        const auto table = severity_table(read_jsonl<LabeledSample>(o.labels));
        if (o.format == "table") std::cout << "Depression (rows) by anxiety (columns)\n" << render_severity_table(table);
        j["severity"] = to_json(table);
    }
    if (!o.dialogues.empty()) {
        const auto stats = dialogue_stats(read_jsonl<Dialogue>(o.dialogues));
        if (o.format == "table") {
            if (!o.labels.empty()) std::cout << "\n";
            std::cout << render_dialogue_stats(stats);
        }
        j["dialogues"] = to_json(stats);
    }
    if (o.format == "json") std::cout << j.dump(2) << "\n";
}

}  // namespace

void register_data(CLI::App& app) {
    {
        auto o = std::make_shared<PrepOptions>();
        auto* cmd = app.add_subcommand("prep", "Length filter, then the optional AI quality filter");
        add_stage_options(*cmd, *o, false);
        cmd->add_option("--min-question", o->min_question, "Minimum question characters");
        cmd->add_option("--min-answer", o->min_answer, "Minimum answer characters");
        cmd->callback([o] { run_prep(*o); });
    }
    {
        auto o = std::make_shared<DedupOptions>();
        auto* cmd = app.add_subcommand("dedup", "MinHash-LSH near-duplicate removal");
        add_stage_options(*cmd, *o, false);
        add_lsh_options(*cmd, o->lsh);
        cmd->add_option("--key", o->key, "Text to compare")->check(CLI::IsMember({"question", "answer", "question_answer"}));
        cmd->callback([o] { run_dedup(*o); });
    }
    {
        auto o = std::make_shared<LabelOptions>();
        auto* cmd = app.add_subcommand("label", "Judge-labeled depression and anxiety severity for long questions");
        add_stage_options(*cmd, *o, true);
        cmd->add_option("--min-chars", o->min_chars, "Questions must be longer than this");
        cmd->add_flag("--no-dedup", o->no_dedup, "Skip question deduplication");
        add_lsh_options(*cmd, o->lsh);
        cmd->callback([o] { run_label(*o); });
    }
    {
        auto o = std::make_shared<SynthOptions>();
        auto* cmd = app.add_subcommand("synth", "Expand single-turn pairs into 5-turn dialogues");
        add_stage_options(*cmd, *o, true);
        cmd->add_flag("--no-quality-filter", o->no_quality_filter, "Keep every parsed dialogue");
        cmd->callback([o] { run_synth(*o); });
    }
    {
        auto o = std::make_shared<StatsOptions>();
        auto* cmd = app.add_subcommand("stats", "Severity cross-table and dialogue statistics");
        cmd->add_option("--labels", o->labels, "LabeledSample JSONL")->check(CLI::ExistingFile);
        cmd->add_option("--dialogues", o->dialogues, "Dialogue JSONL")->check(CLI::ExistingFile);
        cmd->add_option("--format", o->format)->check(CLI::IsMember({"table", "json"}));
        cmd->callback([o] { run_stats(*o); });
    }
}

}  // namespace mhagent::cli
