#pragma once

// Finite-depth model of the no-backtracking subshift and the distance
// cocycle tau(x) = d(o, x_1...x_m w) - d(o, x_2...x_m w), with o = i.
//
// A depth-n cylinder is an admissible stored word of length n. Its tau value
// is evaluated on the periodic extension of its own word: deeper letters are
// copies of the word packed at the stored front, with the lexicographically
// smallest admissible junction letter inserted whenever the word cannot
// follow itself. Orbits of the rational basepoint are computed in exact
// rational arithmetic; only the final arccosh is floating point.

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <vector>

#include "thinlab/generators.hpp"
#include "thinlab/geometry.hpp"

namespace thinlab {

struct SubshiftSpec {
    // Validates that the alphabet has k >= 2 pairs (irreducible, aperiodic A)
    // and picks the basepoint: i, or 1/2 + i if a generator fixes i. Throws
    // if any nonempty admissible word of length <= 6 fixes the basepoint.
    explicit SubshiftSpec(GeneratorSystem system);

    GeneratorSystem system;
    RationalPoint basepoint;
};

class CylinderGrid {
public:
    static constexpr int kDefaultTailPad = 48;

    CylinderGrid(const SubshiftSpec& spec, int depth, int tail_pad = kDefaultTailPad,
                 int threads = 0);

    int depth() const { return depth_; }
    int degree() const { return degree_; }            // 2k - 1 successors per cylinder
    std::size_t size() const { return words_.size(); }
    const std::vector<Word>& words() const { return words_; }
    const Word& word(std::size_t i) const { return words_[i]; }

    double tau(std::size_t i) const { return tau_[i]; }
    const Eigen::VectorXd& tau_values() const { return tau_; }
    // S_n tau on the cylinder's periodic point
    double birkhoff_sum(std::size_t i) const { return birkhoff_[i]; }

    std::uint32_t index_of(const Word& w) const;

    // successor t of cylinder v: the depth-n truncation of (v, letter)
    std::uint32_t successor(std::size_t v, int t) const { return succ_[v * degree_ + t]; }
    Letter successor_letter(std::size_t v, int t) const { return succ_letter_[v * degree_ + t]; }
    std::uint32_t predecessor(std::size_t v, int t) const { return pred_[v * degree_ + t]; }

    // depth-(n+1) cylinders refining cylinder v (one deeper letter at the front)
    std::vector<Word> refinements(std::size_t v) const;

private:
    int depth_;
    int tail_pad_;
    int degree_;
    std::vector<Word> words_;
    std::vector<std::uint32_t> succ_, pred_;
    std::vector<Letter> succ_letter_;
    std::vector<Letter> inverse_of_;
    Eigen::VectorXd tau_;
    Eigen::VectorXd birkhoff_;
    std::size_t bits_per_letter_;
};

// All admissible words of a given length, lexicographic order.
std::vector<Word> admissible_words(const GeneratorSystem& s, int length);

// tau(x) = d(o, x_1...x_m w) - d(o, x_2...x_m w) of the finite word itself
// (tail_pad = 0); a positive tail_pad appends the periodic tail first.
double tau_eval(const SubshiftSpec& spec, const Word& word, int tail_pad = 0);

// Birkhoff sum S_m tau of a finite word, exact telescoped form
// d(o, x_1...x_m w) - d(o, w) when tail_pad = 0.
double birkhoff_eval(const SubshiftSpec& spec, const Word& word, int tail_pad = 0);

struct EventualPositivityResult {
    std::optional<int> m;            // smallest m with min S_m tau > 0
    double min_birkhoff = 0.0;       // at the returned m, or at m_max on failure
    Word worst_cylinder;

    bool succeeded() const { return m.has_value(); }
};

EventualPositivityResult eventual_positivity_check(const SubshiftSpec& spec, int m_max);

// Empirical Holder data of tau: var_n is the largest spread of tau over the
// refinements of a depth-n cylinder; the fit var_n ~ tau_norm * rho^n is
// least squares on the log scale. Reported, never assumed.
struct HolderFit {
    std::vector<std::pair<int, double>> variations;   // (n, var_n)
    double rho = 0.0;
    double tau_norm = 0.0;
};

HolderFit fit_holder_constants(const SubshiftSpec& spec, int n_min, int n_max);

}  // namespace thinlab
