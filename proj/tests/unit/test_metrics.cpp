#include <gtest/gtest.h>

#include <random>

#include "mhagent/backend/scripted_backend.hpp"
#include "mhagent/backend/token_estimate.hpp"
#include "mhagent/domain/errors.hpp"
#include "mhagent/evalbench/classification.hpp"
#include "mhagent/evalbench/metrics.hpp"
#include "support/test_support.hpp"

using namespace mhagent;
using namespace mhagent::evalbench;

namespace {

std::vector<SeverityLevel> levels(std::initializer_list<int> xs) {
    std::vector<SeverityLevel> out;
    for (int x : xs) out.emplace_back(x);
    return out;
}

// Per-class precision/recall/F1 straight from the label lists, weighted by
// true-class frequency.
double brute_force(const std::vector<int>& truth, const std::vector<int>& pred, MetricKind kind) {
    double num = 0.0, den = 0.0;
    for (int c = 0; c < 4; ++c) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            if (pred[i] == c && truth[i] == c) ++tp;
            if (pred[i] == c && truth[i] != c) ++fp;
            if (pred[i] != c && truth[i] == c) ++fn;
        }
        const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
        const double w = tp + fn;
        num += w * (kind == MetricKind::precision ? p : kind == MetricKind::recall ? r : f);
        den += w;
    }
    return num / den;
}

Tokens toks(std::initializer_list<const char*> xs) { return Tokens(xs.begin(), xs.end()); }

std::size_t brute_lcs(const Tokens& a, const Tokens& b) {
    // Exhaustive over subsequences of the shorter list.
    const Tokens& s = a.size() <= b.size() ? a : b;
    const Tokens& l = a.size() <= b.size() ? b : a;
    std::size_t best = 0;
    for (std::uint32_t mask = 0; mask < (1u << s.size()); ++mask) {
        std::size_t j = 0, len = 0;
        bool ok = true;
        for (std::size_t i = 0; i < s.size() && ok; ++i) {
            if (!(mask >> i & 1u)) continue;
            while (j < l.size() && l[j] != s[i]) ++j;
            if (j == l.size()) ok = false;
            else {
                ++j;
                ++len;
            }
        }
        if (ok) best = std::max(best, len);
    }
    return best;
}

}  // namespace

TEST(Confusion, Counts) {
    const auto id = confusion(levels({0, 1, 2, 3}), levels({0, 1, 2, 3}));
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) EXPECT_EQ(id.counts[i][j], i == j ? 1u : 0u);
    }
    EXPECT_EQ(confusion(levels({0, 0}), levels({1, 1})).counts[0][1], 2u);
    EXPECT_THROW(confusion(levels({0}), levels({0, 1})), InputError);
    EXPECT_THROW(confusion(levels({}), levels({})), InputError);

    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> d(0, 3);
    std::vector<SeverityLevel> t, p;
    for (int i = 0; i < 200; ++i) {
        t.emplace_back(d(rng));
        p.emplace_back(d(rng));
    }
    const auto cm = confusion(t, p);
    EXPECT_EQ(cm.total(), 200u);
    std::size_t s = 0;
    for (auto x : cm.supports()) s += x;
    EXPECT_EQ(s, 200u);
}

TEST(WeightedMetric, HandExamples) {
    const auto perfect = confusion(levels({0, 1, 2, 3, 3}), levels({0, 1, 2, 3, 3}));
    for (auto k : {MetricKind::precision, MetricKind::recall, MetricKind::f1}) EXPECT_EQ(weighted_metric(perfect, k), 1.0);
    const auto all_two = confusion(levels({0, 0, 1, 1, 2, 2, 3, 3}), levels({2, 2, 2, 2, 2, 2, 2, 2}));
    EXPECT_DOUBLE_EQ(weighted_metric(all_two, MetricKind::recall), 0.25);
    // Single-class corpus: only class 1 has support.
    const auto single = confusion(levels({1, 1, 1, 1}), levels({1, 1, 0, 2}));
    EXPECT_DOUBLE_EQ(weighted_metric(single, MetricKind::recall), 0.5);
    EXPECT_DOUBLE_EQ(weighted_metric(single, MetricKind::precision), 1.0);
    EXPECT_THROW(weighted_metric(ConfusionMatrix{}, MetricKind::f1), InputError);
}

TEST(WeightedMetric, MatchesBruteForceOnRandomLabelSets) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 60)(rng);
        std::uniform_int_distribution<int> d(0, 3);
        std::vector<int> t, p;
        std::vector<SeverityLevel> ts, ps;
        for (int i = 0; i < n; ++i) {
            t.push_back(d(rng));
            p.push_back(d(rng));
            ts.emplace_back(t.back());
            ps.emplace_back(p.back());
        }
        const auto cm = confusion(ts, ps);
        for (auto k : {MetricKind::precision, MetricKind::recall, MetricKind::f1}) {
            const double v = weighted_metric(cm, k);
            ASSERT_NEAR(v, brute_force(t, p, k), 1e-9);
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 1.0);
        }
        ASSERT_NEAR(weighted_metric(cm, MetricKind::recall), accuracy(cm), 1e-12);
    }
}

TEST(NormScore, AllSixteenPairs) {
    for (int p = 0; p < 4; ++p) {
        for (int t = 0; t < 4; ++t) {
            const double v = norm_score(SeverityLevel(p), SeverityLevel(t));
            EXPECT_EQ(v, 1.0 - std::abs(p - t) / 3.0);
            EXPECT_EQ(v == 1.0, p == t);
            EXPECT_GE(v, 0.0);
            EXPECT_EQ(v, norm_score(SeverityLevel(t), SeverityLevel(p)));
        }
    }
    EXPECT_NEAR(norm_score(SeverityLevel(1), SeverityLevel(3)), 1.0 / 3.0, 1e-15);
}

TEST(Summary, InvalidPredictionsCountAsWrong) {
    const auto truth = levels({0, 1, 2, 3});
    const std::vector<std::optional<SeverityLevel>> pred{SeverityLevel(0), std::nullopt, SeverityLevel(2), SeverityLevel(2)};
    const auto s = summarize(truth, pred);
    EXPECT_EQ(s.samples, 4u);
    EXPECT_EQ(s.invalid, 1u);
    EXPECT_DOUBLE_EQ(s.accuracy, 0.5);
    // Valid subset: truth {0,2,3}, pred {0,2,2}.
    EXPECT_NEAR(s.recall, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(s.score_norm, (1.0 + 0.0 + 1.0 + 2.0 / 3.0) / 4.0, 1e-12);
}

TEST(Classification, ScriptedModelOverFixture) {
    const auto samples = datapipe::read_jsonl<datapipe::LabeledSample>(test_util::fixture("eval_labels.jsonl"));
    backend::ScriptedBackend model(backend::load_script(test_util::fixture("eval_classifier_script.json")));
    const auto r = evaluate_classification(samples, model, {});
    ASSERT_EQ(r.predictions.size(), samples.size());
    EXPECT_EQ(r.depression.invalid, 1u);
    EXPECT_FALSE(r.predictions[5].has_value());
    EXPECT_FALSE(r.errors[5].empty());
    // Sample 1 is planted as (2,2) against truth (1,2).
    EXPECT_NEAR(r.depression.accuracy, 6.0 / 8.0, 1e-12);
    EXPECT_NEAR(r.anxiety.accuracy, 7.0 / 8.0, 1e-12);
}

TEST(Tokenize, RulesAndFixtureSentences) {
    EXPECT_EQ(char_tokenize("你好ok"), toks({"你", "好", "ok"}));
    EXPECT_TRUE(char_tokenize("").empty());
    EXPECT_EQ(char_tokenize("a,b  c!"), toks({"a", "b", "c"}));
    const auto cases = test_util::read_json(test_util::fixture("segmentation.json"));
    ASSERT_EQ(cases.size(), 20u);
    for (const auto& c : cases) {
        const std::string text = c["text"];
        EXPECT_EQ(char_tokenize(text), c["tokens"].get<Tokens>()) << text;
        EXPECT_EQ(backend::estimate_tokens(std::string_view(text)), c["estimate"].get<std::size_t>()) << text;
    }
}

TEST(Bleu, WorkedExamples) {
    EXPECT_DOUBLE_EQ(bleu_n(toks({"a", "b", "c", "d"}), toks({"a", "b", "x", "d"}), 1), 0.75);
    const auto same = toks({"the", "cat", "sat"});
    for (int n = 1; n <= 4; ++n) EXPECT_EQ(bleu_n(same, same, n), 1.0);
    for (int n = 1; n <= 4; ++n) EXPECT_EQ(bleu_n(toks({"a", "b"}), toks({"c", "d"}), n), 0.0);
    EXPECT_EQ(bleu_n({}, toks({"a"}), 1), 0.0);
    EXPECT_THROW(bleu_n(same, same, 0), InputError);
    EXPECT_THROW(bleu_n(same, same, 5), InputError);
    // Without smoothing a missing bigram zeroes BLEU-2.
    BleuOptions raw;
    raw.smoothing = false;
    EXPECT_EQ(bleu_n(toks({"a", "x", "b"}), toks({"a", "b", "x"}), 3, raw), 0.0);
    EXPECT_GT(bleu_n(toks({"a", "x", "b"}), toks({"a", "b", "x"}), 3), 0.0);
}

TEST(Rouge, WorkedExamples) {
    EXPECT_DOUBLE_EQ(rouge_l(toks({"a", "b", "c"}), toks({"a", "c"})), 0.8);
    const auto same = toks({"x", "y", "z"});
    EXPECT_EQ(rouge_n(same, same, 1), 1.0);
    EXPECT_EQ(rouge_n(same, same, 2), 1.0);
    EXPECT_EQ(rouge_l(same, same), 1.0);
    EXPECT_EQ(rouge_n(toks({"a"}), toks({"b"}), 1), 0.0);
    EXPECT_EQ(rouge_l(toks({"a"}), toks({"b"})), 0.0);
    EXPECT_EQ(rouge_l({}, {}), 0.0);
    EXPECT_EQ(rouge_n({}, {}, 1), 0.0);
}

TEST(AutoMetrics, FrozenFixtureValues) {
    const auto cases = test_util::read_json(test_util::fixture("bleu_rouge_pairs.json"));
    ASSERT_GE(cases.size(), 10u);
    for (const auto& c : cases) {
        const std::string cand = c["candidate"], ref = c["reference"];
        const auto s = auto_scores(cand, ref);
        for (std::size_t k = 0; k < AutoScores::kCount; ++k) {
            EXPECT_NEAR(s.values[k], c["scores"][AutoScores::kNames[k]].get<double>(), 1e-6)
                << AutoScores::kNames[k] << " for '" << cand << "' vs '" << ref << "'";
        }
        // LCS is at least as long as any common bigram chain.
        if (s.values[5] > 0.0) EXPECT_GE(lcs_length(char_tokenize(cand), char_tokenize(ref)), 2u);
    }
}

TEST(AutoMetrics, InvariantUnderVocabularyBijection) {
    std::mt19937_64 rng(8);
    const std::vector<std::string> vocab{"a", "b", "c", "d", "e"};
    const std::vector<std::string> image{"狗", "cat", "x1", "猫", "zz"};
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    for (int trial = 0; trial < 100; ++trial) {
        Tokens c, r, c2, r2;
        for (int i = 0; i < 6; ++i) {
            const auto x = pick(rng), y = pick(rng);
            c.push_back(vocab[x]);
            c2.push_back(image[x]);
            r.push_back(vocab[y]);
            r2.push_back(image[y]);
        }
        for (int n = 1; n <= 4; ++n) ASSERT_DOUBLE_EQ(bleu_n(c, r, n), bleu_n(c2, r2, n));
        ASSERT_DOUBLE_EQ(rouge_n(c, r, 2), rouge_n(c2, r2, 2));
        ASSERT_DOUBLE_EQ(rouge_l(c, r), rouge_l(c2, r2));
    }
}

TEST(Lcs, MatchesExhaustiveOracleOnRandomLists) {
    std::mt19937_64 rng(200);
    const std::vector<std::string> vocab{"a", "b", "c"};
    std::uniform_int_distribution<std::size_t> pick(0, 2), len(0, 9);
    for (int trial = 0; trial < 200; ++trial) {
        Tokens a, b;
        for (auto n = len(rng); n > 0; --n) a.push_back(vocab[pick(rng)]);
        for (auto n = len(rng); n > 0; --n) b.push_back(vocab[pick(rng)]);
        const auto l = lcs_length(a, b);
        ASSERT_EQ(l, brute_lcs(a, b));
        const double expect = (a.empty() || b.empty() || l == 0)
                                  ? 0.0
                                  : 2.0 * (double(l) / a.size()) * (double(l) / b.size()) /
                                        (double(l) / a.size() + double(l) / b.size());
        ASSERT_NEAR(rouge_l(a, b), expect, 1e-12);
    }
}

TEST(Bleu, CorpusPoolingDiffersFromAveraging) {
    const std::vector<std::pair<Tokens, Tokens>> pairs{{toks({"a", "b"}), toks({"a", "b"})},
                                                       {toks({"c", "d", "e", "f"}), toks({"c", "x", "y", "z"})}};
    const double pooled = corpus_bleu_n(pairs, 1);
    EXPECT_DOUBLE_EQ(pooled, 3.0 / 6.0);
    const double averaged = (bleu_n(pairs[0].first, pairs[0].second, 1) + bleu_n(pairs[1].first, pairs[1].second, 1)) / 2;
    EXPECT_DOUBLE_EQ(averaged, (1.0 + 0.25) / 2);
}
