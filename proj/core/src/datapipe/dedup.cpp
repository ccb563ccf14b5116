#include "mhagent/datapipe/dedup.hpp"

#include <numeric>
#include <unordered_map>

#include "mhagent/datapipe/minhash.hpp"
#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/text.hpp"

namespace mhagent::datapipe {
namespace {

class DisjointSet {
public:
    explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    // The smaller index becomes the root, so a root is always the first
    // member of its cluster.
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

std::uint64_t band_hash(const MinHashSignature& sig, std::size_t band, std::size_t rows) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ band;
    for (std::size_t r = 0; r < rows; ++r) {
        std::uint64_t v = sig.values[band * rows + r];
        for (int i = 0; i < 8; ++i) {
            h ^= v & 0xff;
            h *= 0x100000001b3ULL;
            v >>= 8;
        }
    }
    return h;
}

}  // namespace

std::vector<QaPair> length_filter(const std::vector<QaPair>& pairs, std::size_t min_q, std::size_t min_a) {
    std::vector<QaPair> out;
    for (const auto& p : pairs) {
        if (text::char_count(p.question) >= min_q && text::char_count(p.answer) >= min_a) out.push_back(p);
    }
    return out;
}

DedupKey dedup_key_from_string(const std::string& s) {
    if (s == "question") return DedupKey::question;
    if (s == "answer") return DedupKey::answer;
    if (s == "question_answer" || s == "both") return DedupKey::question_answer;
    throw ConfigError("unknown dedup key: " + s);
}

std::string dedup_key_text(const QaPair& p, DedupKey key) {
    switch (key) {
        case DedupKey::question: return p.question;
        case DedupKey::answer: return p.answer;
        case DedupKey::question_answer: return p.question + "\n" + p.answer;
    }
    return p.question;
}

void validate(const LshConfig& c) {
    if (c.permutations == 0) throw ConfigError("permutations must be >= 1");
    if (c.bands == 0 || c.rows == 0) throw ConfigError("bands and rows must be >= 1");
    if (c.bands * c.rows != c.permutations) {
        throw ConfigError("bands * rows (" + std::to_string(c.bands * c.rows) + ") must equal permutations (" +
                          std::to_string(c.permutations) + ")");
    }
    if (!(c.threshold > 0.0 && c.threshold < 1.0)) throw ConfigError("threshold must be in (0, 1)");
    if (c.shingle_k == 0) throw ConfigError("shingle size must be >= 1");
}

DedupResult lsh_dedup_texts(const std::vector<std::string>& texts, const LshConfig& config) {
    validate(config);
    const MinHasher hasher(config.permutations, config.seed);
    std::vector<MinHashSignature> sigs(texts.size());
    std::vector<bool> signed_doc(texts.size(), false);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        auto sh = shingle(texts[i], config.shingle_k);
        if (sh.empty()) continue;
        sigs[i] = hasher.signature(sh);
        signed_doc[i] = true;
    }

    DedupResult result;
    DisjointSet clusters(texts.size());
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (std::size_t band = 0; band < config.bands; ++band) {
        buckets.clear();
        for (std::size_t i = 0; i < texts.size(); ++i) {
            if (signed_doc[i]) buckets[band_hash(sigs[i], band, config.rows)].push_back(i);
        }
        for (const auto& [_, members] : buckets) {
            for (std::size_t x = 0; x < members.size(); ++x) {
                for (std::size_t y = x + 1; y < members.size(); ++y) {
                    const std::size_t a = members[x];
                    const std::size_t b = members[y];
                    if (clusters.find(a) == clusters.find(b)) continue;
                    ++result.candidate_pairs;
                    if (estimate_jaccard(sigs[a], sigs[b]) >= config.threshold) clusters.unite(a, b);
                }
            }
        }
    }

    for (std::size_t i = 0; i < texts.size(); ++i) {
        const std::size_t root = clusters.find(i);
        if (root == i) {
            result.kept.push_back(i);
        } else {
            result.removed.emplace_back(i, root);
        }
    }
    return result;
}

QaDedup lsh_dedup(const std::vector<QaPair>& pairs, const LshConfig& config) {
    std::vector<std::string> texts;
    texts.reserve(pairs.size());
    for (const auto& p : pairs) texts.push_back(dedup_key_text(p, config.key));
    const auto r = lsh_dedup_texts(texts, config);
    QaDedup out;
    out.kept.reserve(r.kept.size());
    for (std::size_t i : r.kept) out.kept.push_back(pairs[i]);
    out.removed_count = r.removed.size();
    return out;
}

}  // namespace mhagent::datapipe
