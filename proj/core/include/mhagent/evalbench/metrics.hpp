#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mhagent::evalbench {

using Tokens = std::vector<std::string>;

// CJK characters are single tokens; runs of any other non-space,
// non-punctuation characters (Latin words, digits) form one token.
Tokens char_tokenize(std::string_view text);

struct BleuOptions {
    // Add-one smoothing of the order >= 2 precisions, applied when any
    // order's clipped match count is zero. Unigram precision is never
    // smoothed, so a candidate sharing no token with the reference scores 0.
    bool smoothing = true;
};

// Cumulative BLEU-n with uniform weights and brevity penalty. Empty
// candidate scores 0. Throws InputError unless 1 <= n <= 4.
double bleu_n(const Tokens& candidate, const Tokens& reference, int n, const BleuOptions& options = {});

// Corpus-level variant: clipped counts and lengths are pooled over all
// pairs before the precisions are formed.
double corpus_bleu_n(const std::vector<std::pair<Tokens, Tokens>>& pairs, int n, const BleuOptions& options = {});

// F1 of clipped n-gram overlap; 0 when either side has no n-grams.
double rouge_n(const Tokens& candidate, const Tokens& reference, int n);

std::size_t lcs_length(const Tokens& a, const Tokens& b);

// F1 from the longest common subsequence; 0 when either side is empty.
double rouge_l(const Tokens& candidate, const Tokens& reference);

// B-1..B-4, R-1, R-2, R-L in that order, each in [0,1].
struct AutoScores {
    static constexpr std::size_t kCount = 7;
    static const std::array<const char*, kCount> kNames;

    std::array<double, kCount> values{};

    double total() const;
};

AutoScores auto_scores(std::string_view candidate, std::string_view reference, const BleuOptions& options = {});

}  // namespace mhagent::evalbench
