#include <gtest/gtest.h>

#include <sstream>

#include "mhagent/backend/scripted_backend.hpp"
#include "mhagent/datapipe/records.hpp"
#include "mhagent/domain/errors.hpp"
#include "mhagent/evalbench/report.hpp"
#include "support/test_support.hpp"

using namespace mhagent;
using namespace mhagent::evalbench;
using backend::ChatMessage;
using backend::Role;
using backend::ScriptedBackend;

namespace {

Dialogue three_turns() {
    Dialogue d;
    d.id = "d3";
    d.turns = {{"q1", "r1"}, {"q2", "r2"}, {"q3", "r3"}};
    return d;
}

// Answers every query with the reference reply of the matching turn.
std::shared_ptr<ScriptedBackend> reference_echo(const std::vector<Dialogue>& ds) {
    std::map<std::string, std::string> answers;
    for (const auto& d : ds) {
        for (const auto& t : d.turns) answers[t.query] = t.reply;
    }
    return std::make_shared<ScriptedBackend>(
        [answers](std::span<const ChatMessage> msgs) { return answers.at(std::string(backend::last_user_content(msgs))); });
}

std::shared_ptr<ScriptedBackend> constant(const std::string& text) {
    return std::make_shared<ScriptedBackend>([text](std::span<const ChatMessage>) { return text; });
}

std::vector<std::string> assistant_contents(const std::vector<ChatMessage>& msgs) {
    std::vector<std::string> out;
    for (const auto& m : msgs) {
        if (m.role == Role::assistant) out.push_back(m.content);
    }
    return out;
}

}  // namespace

TEST(Strategy, Names) {
    EXPECT_EQ(to_string(Strategy::label_history), "label");
    EXPECT_EQ(strategy_from_string("output"), Strategy::output_history);
    EXPECT_THROW(strategy_from_string("both"), ConfigError);
}

TEST(Strategy, SingleTurnCallsAreShared) {
    Dialogue d;
    d.id = "one";
    d.turns = {{"only", "ref"}};
    auto a = constant("X");
    auto b = constant("X");
    eval_dialogue(d, *a, Strategy::label_history);
    eval_dialogue(d, *b, Strategy::output_history);
    EXPECT_EQ(a->calls(), b->calls());
}

TEST(Strategy, ReferenceEchoMakesStrategiesIdentical) {
    const auto ds = datapipe::read_jsonl<Dialogue>(test_util::fixture("eval_dialogues.jsonl"));
    auto lab = reference_echo(ds);
    auto out = reference_echo(ds);
    for (const auto& d : ds) {
        const auto rl = eval_dialogue(d, *lab, Strategy::label_history);
        const auto ro = eval_dialogue(d, *out, Strategy::output_history);
        EXPECT_EQ(rl.generated, ro.generated);
        EXPECT_EQ(rl.turns, ro.turns);
        ASSERT_TRUE(rl.complete());
    }
    EXPECT_EQ(lab->calls(), out->calls());
}

TEST(Strategy, ConstantModelDivergesFromTurnTwo) {
    const auto d = three_turns();
    auto lab = constant("X");
    auto out = constant("X");
    eval_dialogue(d, *lab, Strategy::label_history);
    eval_dialogue(d, *out, Strategy::output_history);
    const auto lc = lab->calls();
    const auto oc = out->calls();
    ASSERT_EQ(lc.size(), 3u);
    EXPECT_EQ(lc[0], oc[0]);
    EXPECT_NE(lc[1], oc[1]);
    EXPECT_NE(lc[2], oc[2]);
    EXPECT_EQ(assistant_contents(lc[2]), (std::vector<std::string>{"r1", "r2"}));
    EXPECT_EQ(assistant_contents(oc[2]), (std::vector<std::string>{"X", "X"}));
    for (const auto& call : lc) {
        EXPECT_EQ(call.front().role, Role::system);
        EXPECT_EQ(call.front().content, std::string(kCounselorPersonaPrompt));
    }
}

TEST(Strategy, TurnPromptShape) {
    const auto d = three_turns();
    const auto p = turn_prompt(d, 2, Strategy::label_history, {}, "sys");
    ASSERT_EQ(p.size(), 6u);
    EXPECT_EQ(p[5].content, "q3");
    EXPECT_THROW(turn_prompt(d, 2, Strategy::output_history, {"g1"}, "sys"), InputError);
    EXPECT_THROW(turn_prompt(d, 3, Strategy::label_history, {}, "sys"), InputError);
}

TEST(EvalDialogue, FailureMidDialogueIsPartial) {
    const auto d = three_turns();
    ScriptedBackend model([](std::span<const ChatMessage> msgs) -> std::string {
        if (backend::last_user_content(msgs) == "q2") throw BackendError("overloaded");
        return "ok";
    });
    const auto r = eval_dialogue(d, model, Strategy::output_history);
    EXPECT_FALSE(r.complete());
    EXPECT_EQ(r.generated, (std::vector<std::string>{"ok"}));
    ASSERT_TRUE(r.error.has_value());
    EXPECT_EQ(r.error->rfind("turn 2:", 0), 0u);
}

TEST(Judge, FixtureReplies) {
    const auto cases = test_util::read_json(test_util::fixture("judge_replies.json"));
    ASSERT_EQ(cases.size(), 5u);
    for (const auto& c : cases) {
        const std::string reply = c["reply"];
        const auto s = parse_judge_scores(reply);
        double sum = 0.0;
        for (std::size_t k = 0; k < JudgeScores::kCount; ++k) {
            EXPECT_DOUBLE_EQ(s.values[k], c["scores"][k].get<double>()) << reply;
            sum += c["scores"][k].get<double>();
        }
        EXPECT_DOUBLE_EQ(s.total(), sum);
    }
}

TEST(Judge, ScaleAndErrors) {
    EXPECT_DOUBLE_EQ(parse_judge_scores("2,2,2,2,2").total(), 10.0);
    EXPECT_THROW(parse_judge_scores("2,2,2,2,3"), RangeError);
    EXPECT_THROW(parse_judge_scores("2,2,2"), ParseError);
    EXPECT_THROW(parse_judge_scores("understanding:2 empathy:2"), ParseError);
}

TEST(Judge, TurnRetriesThenThrows) {
    auto bad = constant("I would rather not score this.");
    EXPECT_THROW(judge_turn({}, "q", "reply", *bad), ParseError);
    EXPECT_EQ(bad->call_count(), 3u);
    auto good = constant("2 1 2 1 2");
    EXPECT_DOUBLE_EQ(judge_turn({{"q0", "r0"}}, "q", "reply", *good).total(), 8.0);
    const auto body = good->calls()[0][1].content;
    EXPECT_NE(body.find("q0"), std::string::npos);
    EXPECT_NE(body.find("reply"), std::string::npos);
    EXPECT_THROW(judge_turn({}, "q", "", *good), InputError);
}

TEST(Judge, ContextFollowsStrategy) {
    DialogueEvalRecord r;
    r.turns = {{"q1", "r1"}, {"q2", "r2"}};
    r.generated = {"g1", "g2"};
    r.strategy = Strategy::label_history;
    EXPECT_EQ(judge_context(r, 1), (std::vector<Turn>{{"q1", "r1"}}));
    r.strategy = Strategy::output_history;
    EXPECT_EQ(judge_context(r, 1), (std::vector<Turn>{{"q1", "g1"}}));
    EXPECT_TRUE(judge_context(r, 0).empty());
}

namespace {

ScoredDialogue with_b1(const std::vector<double>& per_turn) {
    ScoredDialogue s;
    for (double v : per_turn) {
        AutoScores a;
        a.values.fill(v);
        s.autos.push_back(a);
        s.record.turns.push_back({"q", "r"});
        s.record.generated.push_back("g");
    }
    return s;
}

}  // namespace

TEST(Aggregate, MeansOverTurnsThenDialogues) {
    const auto one = aggregate({with_b1({0.5})});
    EXPECT_DOUBLE_EQ(one.autos.values[0], 0.5);
    // Turn means 0.2 and 0.4 give 0.3, regardless of turn counts.
    const auto two = aggregate({with_b1({0.1, 0.3}), with_b1({0.4, 0.4, 0.4, 0.4})});
    EXPECT_DOUBLE_EQ(two.autos.values[0], 0.3);
    EXPECT_DOUBLE_EQ(two.autos.total(), 0.3);
    EXPECT_EQ(two.scored_dialogues, 2u);
    EXPECT_FALSE(two.judge.has_value());

    ScoredDialogue failed;
    failed.record.error = "turn 1: boom";
    failed.record.turns = {{"q", "r"}};
    EXPECT_THROW(aggregate({failed}), AggregateError);
    const auto mixed = aggregate({failed, with_b1({0.6})});
    EXPECT_EQ(mixed.failed_dialogues, 1u);
    EXPECT_DOUBLE_EQ(mixed.autos.values[0], 0.6);
}

TEST(Aggregate, JudgeBlockSkipsUnscoredTurns) {
    auto a = with_b1({0.5, 0.5});
    JudgeScores full;
    full.values.fill(2.0);
    JudgeScores half;
    half.values.fill(1.0);
    a.judged = {full, std::nullopt};
    auto b = with_b1({0.5});
    b.judged = {half};
    const auto r = aggregate({a, b});
    ASSERT_TRUE(r.judge.has_value());
    EXPECT_DOUBLE_EQ(r.judge->values[0], 1.5);
    EXPECT_EQ(r.unscored_turns, 1u);
    EXPECT_EQ(r.judged_dialogues, 2u);
}

TEST(Report, FixtureRunLayout) {
    const auto ds = datapipe::read_jsonl<Dialogue>(test_util::fixture("eval_dialogues.jsonl"));
    ScriptedBackend model(backend::load_script(test_util::fixture("eval_model_script.json")));
    ScriptedBackend judge(backend::load_script(test_util::fixture("eval_judge_script.json")));
    EvalReport rep;
    rep.model = "scripted";
    rep.label = evaluate_dialogues(ds, model, &judge, Strategy::label_history, {}, {}, {}, 4).report;
    rep.output = evaluate_dialogues(ds, model, &judge, Strategy::output_history, {}, {}, {}, 4).report;
    EXPECT_EQ(rep.label->scored_dialogues, 10u);
    EXPECT_EQ(rep.output->scored_dialogues, 10u);
    ASSERT_TRUE(rep.label->judge.has_value());
    EXPECT_DOUBLE_EQ(rep.label->judge->total(), 8.0);

    const auto table = render_auto_table(rep);
    std::istringstream lines(table);
    std::string groups, subs, data;
    std::getline(lines, groups);
    std::getline(lines, subs);
    std::getline(lines, data);
    for (const char* g : {"BLEU-1", "BLEU-2", "BLEU-3", "BLEU-4", "ROUGE-1", "ROUGE-2", "ROUGE-L", "Total"}) {
        EXPECT_NE(groups.find(g), std::string::npos) << g;
    }
    EXPECT_EQ(subs.rfind("Model", 0), 0u);
    std::size_t labs = 0, pos = 0;
    while ((pos = subs.find("Lab.", pos)) != std::string::npos) ++labs, ++pos;
    EXPECT_EQ(labs, 8u);
    EXPECT_EQ(data.rfind("scripted", 0), 0u);
    EXPECT_NE(data.find(format_fixed(100.0 * rep.label->autos.total(), 2)), std::string::npos);

    const auto judge_table = render_judge_table(rep);
    for (const char* g : JudgeScores::kNames) EXPECT_NE(judge_table.find(g), std::string::npos) << g;
    EXPECT_NE(judge_table.find("8.000"), std::string::npos);

    const auto j = to_json(rep);
    EXPECT_EQ(j["label_history"]["auto"].size(), 8u);
    EXPECT_EQ(j["output_history"]["judge"].size(), 6u);
}

TEST(Report, FormatFixedRoundsHalfToEven) {
    EXPECT_EQ(format_fixed(0.125, 2), "0.12");
    EXPECT_EQ(format_fixed(0.375, 2), "0.38");
    EXPECT_EQ(format_fixed(23.236, 2), "23.24");
    EXPECT_EQ(format_fixed(1.0, 3), "1.000");
}
