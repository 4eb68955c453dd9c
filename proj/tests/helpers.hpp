#pragma once

// Shared fixtures and generators for the test suites.

#include <random>

#include "thinlab/generators.hpp"

namespace thinlab::testing {

inline GeneratorSystem sanov() {
    return GeneratorSystem({Mat2Z(1, 2, 0, 1), Mat2Z(1, 0, 2, 1)});
}

inline GeneratorSystem schottky() {
    return GeneratorSystem({Mat2Z(3, 1, 2, 1), Mat2Z(11, -39, 2, -7)});
}

inline GeneratorSystem modular_group() {
    return GeneratorSystem({Mat2Z(1, 1, 0, 1), Mat2Z(1, 0, 1, 1)});
}

inline Word random_admissible_word(const GeneratorSystem& s, int length, std::mt19937_64& rng) {
    Word w;
    std::uniform_int_distribution<int> pick(0, static_cast<int>(s.alphabet_size()) - 1);
    while (static_cast<int>(w.size()) < length) {
        const Letter j = static_cast<Letter>(pick(rng));
        if (!w.empty() && !s.transition(w.back(), j)) continue;
        w.push_back(j);
    }
    return w;
}

inline Mat2Z random_element(const GeneratorSystem& s, int length, std::mt19937_64& rng) {
    return word_to_matrix(s, random_admissible_word(s, length, rng));
}

}  // namespace thinlab::testing
