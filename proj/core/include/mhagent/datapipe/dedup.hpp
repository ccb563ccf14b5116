#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mhagent/datapipe/records.hpp"

namespace mhagent::datapipe {

// Keeps pairs with at least min_q question and min_a answer code points.
std::vector<QaPair> length_filter(const std::vector<QaPair>& pairs, std::size_t min_q = 50,
                                  std::size_t min_a = 100);

enum class DedupKey { question, answer, question_answer };

DedupKey dedup_key_from_string(const std::string& s);
std::string dedup_key_text(const QaPair& p, DedupKey key);

struct LshConfig {
    std::size_t permutations = 128;
    std::size_t bands = 32;
    std::size_t rows = 4;
    double threshold = 0.70;
    std::size_t shingle_k = 3;
    std::uint64_t seed = 1;
    DedupKey key = DedupKey::question_answer;
};

void validate(const LshConfig& config);

struct DedupResult {
    std::vector<std::size_t> kept;
    // (removed index, index of the kept representative of its cluster)
    std::vector<std::pair<std::size_t, std::size_t>> removed;
    std::size_t candidate_pairs = 0;
};

// Banding finds candidate pairs; a candidate only links two documents when
// its signature estimate reaches the threshold. Linked documents form
// clusters and the earliest member of each cluster is kept. Empty texts are
// never linked.
DedupResult lsh_dedup_texts(const std::vector<std::string>& texts, const LshConfig& config);

struct QaDedup {
    std::vector<QaPair> kept;
    std::size_t removed_count = 0;
};

QaDedup lsh_dedup(const std::vector<QaPair>& pairs, const LshConfig& config = {});

}  // namespace mhagent::datapipe
