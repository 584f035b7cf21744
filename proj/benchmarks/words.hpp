#pragma once

#include <random>
#include <string>

namespace bench {

inline std::string random_text(std::mt19937& rng, std::size_t words) {
    static constexpr const char* kSyllables[] = {"ka", "lo", "mi", "ne", "ru", "ta", "vi", "zo", "pe", "su"};
    std::uniform_int_distribution<int> syl(0, 9), len(1, 4);
    std::string out;
    for (std::size_t w = 0; w < words; ++w) {
        if (w) out += ' ';
        for (int i = len(rng); i > 0; --i) out += kSyllables[syl(rng)];
    }
    return out;
}

}  // namespace bench
