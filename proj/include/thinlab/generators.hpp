#pragma once

// Symmetric generator systems and admissible words.
//
// A system built from k input matrices stores the alphabet
// (g_1, g_1^{-1}, ..., g_k, g_k^{-1}) of size 2k, the inverse pairing
// i <-> i^1, and the no-backtracking transition matrix A with
// A(i, j) = 0 iff j = pair(i).
//
// Word convention (shared by every module): a word (i_1, ..., i_n) stored as
// letters[0..n-1] maps to the product g_{i_n} ... g_{i_1}; letters[0] acts
// first on a point. Appending a letter therefore multiplies on the left,
// which is also how new symbols enter the transfer-operator iterates.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "thinlab/mat2.hpp"

namespace thinlab {

using Letter = std::uint8_t;
using Word = std::vector<Letter>;

class GeneratorSystem {
public:
    // `half` holds g_1, ..., g_k; inverses are appended automatically.
    explicit GeneratorSystem(const std::vector<Mat2Z>& half);

    std::size_t alphabet_size() const { return gens_.size(); }
    std::size_t rank() const { return gens_.size() / 2; }

    const Mat2Z& generator(Letter i) const { return gens_.at(i); }
    const std::vector<Mat2Z>& generators() const { return gens_; }

    Letter inverse_of(Letter i) const { return inverse_of_.at(i); }

    // A(i, j): may word ...i be followed by letter j?
    bool transition(Letter i, Letter j) const {
        return j != inverse_of_[i];
    }

    bool is_admissible(const Word& w) const;

    // Letters admissible after `last`; all letters for an empty word.
    std::vector<Letter> continuations(int last) const;

private:
    std::vector<Mat2Z> gens_;
    std::vector<Letter> inverse_of_;
};

// Product g_{i_n} ... g_{i_1} of an admissible word; identity for the empty
// word. Throws on inadmissible input.
Mat2Z word_to_matrix(const GeneratorSystem& s, const Word& w);

}  // namespace thinlab
