#include "mhagent/evalbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/text.hpp"

namespace mhagent::evalbench {
namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts ngram_counts(const Tokens& toks, int n) {
    NgramCounts out;
    const auto un = static_cast<std::size_t>(n);
    if (toks.size() < un) return out;
    for (std::size_t i = 0; i + un <= toks.size(); ++i) {
        std::string key = toks[i];
        for (std::size_t k = 1; k < un; ++k) {
            key += '\x1f';
            key += toks[i + k];
        }
        ++out[key];
    }
    return out;
}

std::size_t clipped_overlap(const NgramCounts& cand, const NgramCounts& ref) {
    std::size_t m = 0;
    for (const auto& [g, c] : cand) {
        const auto it = ref.find(g);
        if (it != ref.end()) m += std::min(c, it->second);
    }
    return m;
}

std::size_t ngram_total(std::size_t len, int n) {
    const auto un = static_cast<std::size_t>(n);
    return len >= un ? len - un + 1 : 0;
}

void check_order(int n) {
    if (n < 1 || n > 4) throw InputError("BLEU order must be in [1,4]");
}

struct BleuCounts {
    std::array<std::size_t, 4> matches{};
    std::array<std::size_t, 4> totals{};
    std::size_t cand_len = 0;
    std::size_t ref_len = 0;

    void add(const Tokens& cand, const Tokens& ref, int n) {
        for (int i = 1; i <= n; ++i) {
            matches[i - 1] += clipped_overlap(ngram_counts(cand, i), ngram_counts(ref, i));
            totals[i - 1] += ngram_total(cand.size(), i);
        }
        cand_len += cand.size();
        ref_len += ref.size();
    }
};

double bleu_from_counts(const BleuCounts& c, int n, const BleuOptions& options) {
    if (c.cand_len == 0 || c.matches[0] == 0) return 0.0;
    bool any_zero = false;
    for (int i = 0; i < n; ++i) any_zero = any_zero || c.matches[i] == 0;
    double log_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double p;
        if (i > 0 && options.smoothing && any_zero) {
            p = static_cast<double>(c.matches[i] + 1) / static_cast<double>(c.totals[i] + 1);
        } else {
            p = c.totals[i] ? static_cast<double>(c.matches[i]) / static_cast<double>(c.totals[i]) : 0.0;
        }
        if (p <= 0.0) return 0.0;
        log_sum += std::log(p);
    }
    const double geo = std::exp(log_sum / n);
    const double bp = c.cand_len < c.ref_len
                          ? std::exp(1.0 - static_cast<double>(c.ref_len) / static_cast<double>(c.cand_len))
                          : 1.0;
    return bp * geo;
}

double f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

Tokens char_tokenize(std::string_view s) {
    Tokens out;
    std::u32string run;
    auto flush = [&] {
        if (!run.empty()) {
            out.push_back(text::encode_utf8(run));
            run.clear();
        }
    };
    for (char32_t cp : text::decode_utf8(s)) {
        if (text::is_cjk(cp)) {
            flush();
            out.push_back(text::encode_utf8(cp));
        } else if (text::is_space(cp) || text::is_punct(cp)) {
            flush();
        } else {
            run.push_back(cp);
        }
    }
    flush();
    return out;
}

double bleu_n(const Tokens& candidate, const Tokens& reference, int n, const BleuOptions& options) {
    check_order(n);
    BleuCounts c;
    c.add(candidate, reference, n);
    return bleu_from_counts(c, n, options);
}

double corpus_bleu_n(const std::vector<std::pair<Tokens, Tokens>>& pairs, int n, const BleuOptions& options) {
    check_order(n);
    BleuCounts c;
    for (const auto& [cand, ref] : pairs) c.add(cand, ref, n);
    return bleu_from_counts(c, n, options);
}

double rouge_n(const Tokens& candidate, const Tokens& reference, int n) {
    if (n < 1) throw InputError("ROUGE order must be >= 1");
    const std::size_t ct = ngram_total(candidate.size(), n);
    const std::size_t rt = ngram_total(reference.size(), n);
    if (ct == 0 || rt == 0) return 0.0;
    const auto overlap = static_cast<double>(clipped_overlap(ngram_counts(candidate, n), ngram_counts(reference, n)));
    return f1(overlap / static_cast<double>(ct), overlap / static_cast<double>(rt));
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double rouge_l(const Tokens& candidate, const Tokens& reference) {
    if (candidate.empty() || reference.empty()) return 0.0;
    const auto l = static_cast<double>(lcs_length(candidate, reference));
    return f1(l / static_cast<double>(candidate.size()), l / static_cast<double>(reference.size()));
}

const std::array<const char*, AutoScores::kCount> AutoScores::kNames{"B-1", "B-2", "B-3", "B-4",
                                                                    "R-1", "R-2", "R-L"};

double AutoScores::total() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(kCount);
}

AutoScores auto_scores(std::string_view candidate, std::string_view reference, const BleuOptions& options) {
    const Tokens c = char_tokenize(candidate);
    const Tokens r = char_tokenize(reference);
    AutoScores out;
    for (int n = 1; n <= 4; ++n) out.values[static_cast<std::size_t>(n - 1)] = bleu_n(c, r, n, options);
    out.values[4] = rouge_n(c, r, 1);
    out.values[5] = rouge_n(c, r, 2);
    out.values[6] = rouge_l(c, r);
    return out;
}

}  // namespace mhagent::evalbench
