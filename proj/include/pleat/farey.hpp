#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "pleat/error.hpp"

namespace pleat
{

enum class Letter : char { R = 'R', L = 'L' };

inline Letter flip(Letter l) { return l == Letter::R ? Letter::L : Letter::R; }

struct Syllable {
    Letter letter;
    int exponent;
    bool operator==(const Syllable&) const = default;
};

/** @brief 2x2 integer matrix, row-major (a b; c d) */
struct IntMatrix2 {
    std::int64_t a{1}, b{0}, c{0}, d{1};

    [[nodiscard]] std::int64_t det() const { return a * d - b * c; }
    [[nodiscard]] std::int64_t trace() const { return a + d; }
    IntMatrix2 operator*(const IntMatrix2& o) const
    {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
                c * o.b + d * o.d};
    }
    IntMatrix2 operator-() const { return {-a, -b, -c, -d}; }
    bool operator==(const IntMatrix2&) const = default;

    static IntMatrix2 R() { return {1, 1, 0, 1}; }
    static IntMatrix2 L() { return {1, 0, 1, 1}; }
};

namespace detail
{
inline std::vector<Syllable> group(const std::vector<Letter>& letters)
{
    std::vector<Syllable> out;
    for (auto l : letters) {
        if (!out.empty() && out.back().letter == l) {
            ++out.back().exponent;
        } else {
            out.push_back({l, 1});
        }
    }
    return out;
}

inline std::vector<Letter> expand(const std::vector<Syllable>& s)
{
    std::vector<Letter> out;
    for (const auto& syl : s) {
        out.insert(out.end(), static_cast<std::size_t>(syl.exponent), syl.letter);
    }
    return out;
}

inline std::string compact(const std::vector<Syllable>& s)
{
    std::string out;
    for (const auto& syl : s) {
        out.push_back(static_cast<char>(syl.letter));
        if (syl.exponent != 1) {
            out += std::to_string(syl.exponent);
        }
    }
    return out;
}

// Letters of "R3l2R" etc.
inline std::vector<Letter> lex_word(const std::string& text)
{
    std::vector<Letter> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char ch = static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
            continue;
        }
        if (ch != 'R' && ch != 'L') {
            throw Error(ErrorCode::Parse, "unexpected character '" +
                                              std::string(1, text[i]) + "' in word");
        }
        ++i;
        std::size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
            ++j;
        }
        long long run = 1;
        if (j > i) {
            if (j - i > 6) {
                throw Error(ErrorCode::Parse, "run length too large");
            }
            run = std::stoll(text.substr(i, j - i));
            if (run <= 0) {
                throw Error(ErrorCode::Parse, "run lengths must be positive");
            }
        }
        out.insert(out.end(), static_cast<std::size_t>(run),
                   ch == 'R' ? Letter::R : Letter::L);
        i = j;
    }
    if (out.empty()) {
        throw Error(ErrorCode::WordEmpty, "empty word");
    }
    return out;
}

inline std::int64_t floor_div(std::int64_t n, std::int64_t d)
{
    std::int64_t q = n / d;
    if ((n % d != 0) && ((n < 0) != (d < 0))) {
        --q;
    }
    return q;
}

inline std::int64_t isqrt(std::int64_t n)
{
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(n)));
    while (r * r > n) {
        --r;
    }
    while ((r + 1) * (r + 1) <= n) {
        ++r;
    }
    return r;
}
}  // namespace detail

/** @brief Cyclic word in R and L containing both letters */
struct MonodromyWord {
    std::vector<Syllable> syllables;

    [[nodiscard]] int length() const
    {
        int m = 0;
        for (const auto& s : syllables) {
            m += s.exponent;
        }
        return m;
    }
    /** Number of R-syllables */
    [[nodiscard]] int n() const
    {
        return static_cast<int>(std::count_if(syllables.begin(), syllables.end(),
                                              [](const Syllable& s) {
                                                  return s.letter == Letter::R;
                                              }));
    }
    [[nodiscard]] std::vector<Letter> letters() const { return detail::expand(syllables); }
    [[nodiscard]] std::string str() const { return detail::compact(syllables); }

    /** @brief Build from a cyclic letter sequence, merging across the seam */
    static MonodromyWord from_letters(const std::vector<Letter>& letters)
    {
        if (letters.empty()) {
            throw Error(ErrorCode::WordEmpty, "empty word");
        }
        bool hasR = std::find(letters.begin(), letters.end(), Letter::R) != letters.end();
        bool hasL = std::find(letters.begin(), letters.end(), Letter::L) != letters.end();
        if (!hasR || !hasL) {
            throw Error(ErrorCode::WordNotMixed,
                        "word must contain both R and L (monodromy not Anosov)");
        }
        auto syl = detail::group(letters);
        if (syl.size() > 1 && syl.front().letter == syl.back().letter) {
            syl.front().exponent += syl.back().exponent;
            syl.pop_back();
        }
        return MonodromyWord{syl};
    }

    bool operator==(const MonodromyWord&) const = default;
};

/** @brief Linear word of a two-bridge link; at least two syllables */
struct BridgeWord {
    std::vector<Syllable> syllables;

    /** Crossing number c */
    [[nodiscard]] int crossings() const
    {
        int c = 0;
        for (const auto& s : syllables) {
            c += s.exponent;
        }
        return c;
    }
    /** Twist number tw */
    [[nodiscard]] int twist() const { return static_cast<int>(syllables.size()); }
    [[nodiscard]] Letter first() const { return syllables.front().letter; }
    [[nodiscard]] std::vector<Letter> letters() const { return detail::expand(syllables); }
    [[nodiscard]] std::string str() const { return detail::compact(syllables); }

    static BridgeWord from_letters(const std::vector<Letter>& letters)
    {
        if (letters.empty()) {
            throw Error(ErrorCode::WordEmpty, "empty word");
        }
        auto syl = detail::group(letters);
        if (syl.size() < 2) {
            throw Error(ErrorCode::TooFewSyllables,
                        "a two-bridge word needs two or more syllables");
        }
        return BridgeWord{syl};
    }

    bool operator==(const BridgeWord&) const = default;
};

inline MonodromyWord parse_bundle_word(const std::string& text)
{
    return MonodromyWord::from_letters(detail::lex_word(text));
}

inline BridgeWord parse_bridge_word(const std::string& text)
{
    return BridgeWord::from_letters(detail::lex_word(text));
}

/** @brief Parse "a,b,c,d" (row-major); determinant must be one */
inline IntMatrix2 parse_matrix(const std::string& text)
{
    std::vector<std::int64_t> v;
    std::size_t i = 0;
    while (i <= text.size()) {
        std::size_t j = text.find(',', i);
        if (j == std::string::npos) {
            j = text.size();
        }
        std::string tok = text.substr(i, j - i);
        tok.erase(std::remove_if(tok.begin(), tok.end(),
                                 [](unsigned char ch) { return std::isspace(ch); }),
                  tok.end());
        std::size_t used = 0;
        try {
            v.push_back(std::stoll(tok, &used));
        } catch (const std::exception&) {
            throw Error(ErrorCode::Parse, "bad matrix entry '" + tok + "'");
        }
        if (used != tok.size()) {
            throw Error(ErrorCode::Parse, "bad matrix entry '" + tok + "'");
        }
        i = j + 1;
    }
    if (v.size() != 4) {
        throw Error(ErrorCode::Parse, "matrix needs four entries a,b,c,d");
    }
    IntMatrix2 M{v[0], v[1], v[2], v[3]};
    if (M.det() != 1) {
        throw Error(ErrorCode::Parse, "matrix determinant must be 1");
    }
    return M;
}

inline IntMatrix2 word_to_matrix(const MonodromyWord& w)
{
    IntMatrix2 M;
    for (const auto& s : w.syllables) {
        const IntMatrix2 f = s.letter == Letter::R ? IntMatrix2::R() : IntMatrix2::L();
        for (int k = 0; k < s.exponent; ++k) {
            M = M * f;
        }
    }
    return M;
}

/** @brief Rotate to the lexicographically least rotation, ordering R before L */
inline MonodromyWord canonical_rotation(const MonodromyWord& w)
{
    auto letters = w.letters();
    const auto m = letters.size();
    auto key = [](Letter l) { return l == Letter::R ? 0 : 1; };
    std::size_t best = 0;
    for (std::size_t s = 1; s < m; ++s) {
        for (std::size_t k = 0; k < m; ++k) {
            int a = key(letters[(s + k) % m]);
            int b = key(letters[(best + k) % m]);
            if (a != b) {
                if (a < b) {
                    best = s;
                }
                break;
            }
        }
    }
    std::rotate(letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(best),
                letters.end());
    return MonodromyWord::from_letters(letters);
}

inline bool same_up_to_rotation(const MonodromyWord& a, const MonodromyWord& b)
{
    return canonical_rotation(a) == canonical_rotation(b);
}

/**
 * @brief Cyclic word of an Anosov matrix, via the periodic continued fraction
 * of the slope of its expanding eigenvector.
 *
 * If trace < -2 the matrix is negated first and `negated` is set.
 */
inline MonodromyWord matrix_to_word(IntMatrix2 M, bool* negated = nullptr)
{
    if (M.det() != 1) {
        throw Error(ErrorCode::Parse, "matrix determinant must be 1");
    }
    bool neg = false;
    if (M.trace() < -2) {
        M = -M;
        neg = true;
    }
    if (negated) {
        *negated = neg;
    }
    if (M.trace() <= 2) {
        throw Error(ErrorCode::NotAnosov, "|trace| <= 2");
    }
    // x = (P + sqrt(D)) / Q is the attracting fixed point of z -> (az+b)/(cz+d)
    const std::int64_t D = M.trace() * M.trace() - 4;
    std::int64_t P = M.a - M.d;
    std::int64_t Q = 2 * M.c;
    const std::int64_t s0 = detail::isqrt(D);

    std::vector<std::int64_t> terms;
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> seen;
    std::size_t start = 0, stop = 0;
    for (;;) {
        auto it = seen.find({P, Q});
        if (it != seen.end()) {
            start = it->second;
            stop = terms.size();
            break;
        }
        seen[{P, Q}] = terms.size();
        std::int64_t t = Q > 0 ? detail::floor_div(P + s0, Q)
                               : detail::floor_div(-P - s0 - 1, -Q);
        terms.push_back(t);
        P = t * Q - P;
        Q = (D - P * P) / Q;
    }

    std::vector<Letter> letters;
    auto period = stop - start;
    auto reps = period % 2 == 1 ? 2 : 1;
    for (std::size_t r = 0; r < static_cast<std::size_t>(reps); ++r) {
        for (std::size_t k = start; k < stop; ++k) {
            auto idx = k + r * period;
            Letter l = idx % 2 == 0 ? Letter::R : Letter::L;
            letters.insert(letters.end(), static_cast<std::size_t>(terms[k]), l);
        }
    }
    auto prim = MonodromyWord::from_letters(letters);
    const IntMatrix2 Pm = word_to_matrix(prim);
    IntMatrix2 acc = Pm;
    int power = 1;
    while (acc.trace() < M.trace()) {
        acc = acc * Pm;
        ++power;
    }
    if (acc.trace() != M.trace()) {
        throw Error(ErrorCode::NotAnosov, "matrix is not a power of its primitive root");
    }
    std::vector<Letter> full;
    for (int k = 0; k < power; ++k) {
        full.insert(full.end(), letters.begin(), letters.end());
    }
    return canonical_rotation(MonodromyWord::from_letters(full));
}

}  // namespace pleat
