#pragma once

#include <random>
#include <string>
#include <vector>

#include "pleat/error.hpp"
#include "pleat/farey.hpp"

namespace support
{

template <class F>
pleat::ErrorCode code_of(F f)
{
    try {
        f();
    } catch (const pleat::Error& e) {
        return e.code();
    }
    throw std::runtime_error("no error raised");
}

/** Compact word with alternating syllables starting at R */
inline std::string syllable_word(const std::vector<int>& exps)
{
    std::string s;
    for (std::size_t k = 0; k < exps.size(); ++k) {
        s += k % 2 == 0 ? 'R' : 'L';
        if (exps[k] > 1) {
            s += std::to_string(exps[k]);
        }
    }
    return s;
}

/** Bundle word with an even number 2..max_syl of syllables, exponents 1..max_exp */
inline std::string random_bundle_word(std::mt19937_64& rng, int max_syl, int max_exp)
{
    const int n = std::uniform_int_distribution<int>(1, max_syl / 2)(rng);
    std::uniform_int_distribution<int> e(1, max_exp);
    std::vector<int> exps;
    for (int k = 0; k < 2 * n; ++k) {
        exps.push_back(e(rng));
    }
    return syllable_word(exps);
}

/** Bridge word with 2..max_tw syllables and exponents 1..max_exp */
inline std::string random_bridge_word(std::mt19937_64& rng, int max_tw, int max_exp)
{
    const int tw = std::uniform_int_distribution<int>(2, max_tw)(rng);
    std::uniform_int_distribution<int> e(1, max_exp);
    std::vector<int> exps;
    for (int k = 0; k < tw; ++k) {
        exps.push_back(e(rng));
    }
    return syllable_word(exps);
}

}  // namespace support
