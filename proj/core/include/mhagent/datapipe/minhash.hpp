#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mhagent::datapipe {

// Character k-grams of the whitespace-collapsed text. Text shorter than k
// yields a single shingle holding the whole text (empty text: no shingles).
std::set<std::string> shingle(std::string_view text, std::size_t k = 3);

struct MinHashSignature {
    std::vector<std::uint64_t> values;

    friend bool operator==(const MinHashSignature&, const MinHashSignature&) = default;
};

// Fraction of positions on which two signatures agree. Throws InputError on
// a length mismatch.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

// Family of `permutations` universal hash functions h(x) = (a*x + b) mod p
// over the Mersenne prime p = 2^61 - 1, drawn from a seeded mt19937_64 so a
// seed reproduces the same family on every platform.
class MinHasher {
public:
    explicit MinHasher(std::size_t permutations = 128, std::uint64_t seed = 1);

    // Throws InputError on an empty shingle set.
    MinHashSignature signature(const std::set<std::string>& shingles) const;

    std::size_t permutations() const { return a_.size(); }

private:
    std::vector<std::uint64_t> a_;
    std::vector<std::uint64_t> b_;
};

}  // namespace mhagent::datapipe
