#include "mhagent/datapipe/minhash.hpp"

#include <limits>
#include <random>

#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/text.hpp"

namespace mhagent::datapipe {
namespace {

__extension__ using u128 = unsigned __int128;

constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

std::uint64_t mod_mersenne61(u128 x) {
    std::uint64_t r = static_cast<std::uint64_t>(x & kMersenne61) + static_cast<std::uint64_t>(x >> 61);
    r = (r & kMersenne61) + (r >> 61);
    return r >= kMersenne61 ? r - kMersenne61 : r;
}

}  // namespace

std::set<std::string> shingle(std::string_view raw, std::size_t k) {
    if (k == 0) throw InputError("shingle size must be >= 1");
    const std::u32string cps = text::decode_utf8(text::collapse_whitespace(raw));
    std::set<std::string> out;
    if (cps.empty()) return out;
    if (cps.size() < k) {
        out.insert(text::encode_utf8(cps));
        return out;
    }
    const std::u32string_view view(cps);
    for (std::size_t i = 0; i + k <= cps.size(); ++i) out.insert(text::encode_utf8(view.substr(i, k)));
    return out;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.values.size() != b.values.size()) throw InputError("signature lengths differ");
    if (a.values.empty()) return 0.0;
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) same += a.values[i] == b.values[i];
    return static_cast<double>(same) / static_cast<double>(a.values.size());
}

MinHasher::MinHasher(std::size_t permutations, std::uint64_t seed) {
    if (permutations == 0) throw InputError("permutation count must be >= 1");
    std::mt19937_64 rng(seed);
    a_.reserve(permutations);
    b_.reserve(permutations);
    for (std::size_t i = 0; i < permutations; ++i) {
        a_.push_back(rng() % (kMersenne61 - 1) + 1);
        b_.push_back(rng() % kMersenne61);
    }
}

MinHashSignature MinHasher::signature(const std::set<std::string>& shingles) const {
    if (shingles.empty()) throw InputError("cannot sign an empty shingle set");
    MinHashSignature sig;
    sig.values.assign(a_.size(), std::numeric_limits<std::uint64_t>::max());
    for (const auto& s : shingles) {
        const std::uint64_t x = text::fnv1a64(s) % kMersenne61;
        for (std::size_t i = 0; i < a_.size(); ++i) {
            const std::uint64_t h = mod_mersenne61(static_cast<u128>(a_[i]) * x + b_[i]);
            if (h < sig.values[i]) sig.values[i] = h;
        }
    }
    return sig;
}

}  // namespace mhagent::datapipe
