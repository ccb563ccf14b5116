#pragma once

#include <random>
#include <string>

namespace mhagent::bench {

inline std::string random_text(std::mt19937_64& rng, int words) {
    std::uniform_int_distribution<int> len(2, 8), ch('a', 'z');
    std::string s;
    for (int w = 0; w < words; ++w) {
        if (w) s += ' ';
        for (int n = len(rng); n > 0; --n) s.push_back(static_cast<char>(ch(rng)));
    }
    return s;
}

}  // namespace mhagent::bench
