#pragma once

// Exact enumeration of the group ball { gamma : ||gamma|| <= T }.
//
// Breadth-first search by word length over states (element, last letter),
// deduplicated on both states and elements; no freeness assumption. A state
// is expanded only while the element's norm stays inside an exploration
// window slack*T + pad, since admissible-word norms may dip after a rise
// (parabolic directions, relators). The window is validated against the
// exhaustive word oracle in the tests. The proven singular-value prune
// (all extensions of w have norm >= sigma_min(w)*sqrt(2)) is applied too.

#include <cstdint>
#include <vector>

#include "thinlab/generators.hpp"
#include "thinlab/mat2.hpp"

namespace thinlab {

struct BallOptions {
    double window_slack = 3.0;     // explore while ||g|| <= slack*T + pad
    double window_pad = 8.0;
    std::uint64_t element_budget = 8'000'000;  // distinct elements, in or out of the ball
    int threads = 0;               // 0: resolve from THINLAB_THREADS, default 1
    int max_word_length = 0;       // 0: unlimited
};

struct BallEntry {
    Mat2Z element;
    mpz_class norm_sq;
    std::uint16_t word_length = 0;
    std::int32_t parent = -1;      // index of the BFS parent in `entries`
    Letter via = 0;                // last letter of the recorded word
};

struct BallEnumeration {
    // Every distinct element visited, in BFS order (parents precede children).
    std::vector<BallEntry> entries;
    // Indices of the elements with norm <= T, sorted by (norm_sq, lex entries);
    // this canonical order is what all outputs and tabulations use.
    std::vector<std::uint32_t> in_ball;
    bool truncated = false;        // element budget hit; results are partial

    std::size_t count() const { return in_ball.size(); }

    // Word certificate of entries[idx] (empty for the identity).
    Word word_of(std::size_t idx) const;
};

BallEnumeration enumerate_ball(const GeneratorSystem& s, double T,
                               const BallOptions& opt = {});

// Independent oracle: every admissible word of length <= max_len, dedup by
// exact matrix equality, filtered to norm <= T, sorted lexicographically.
// Exponential in max_len.
std::vector<Mat2Z> exhaustive_ball_oracle(const GeneratorSystem& s, double T, int max_len);

}  // namespace thinlab
