#include "thinlab/generators.hpp"


namespace thinlab {

GeneratorSystem::GeneratorSystem(const std::vector<Mat2Z>& half) {
    if (half.empty()) throw std::invalid_argument("GeneratorSystem: no generators");
    if (half.size() > 100) throw std::invalid_argument("GeneratorSystem: too many generators");
    for (std::size_t i = 0; i < half.size(); ++i) {
        const Mat2Z& g = half[i];
        if (det(g) != 1)
            throw std::invalid_argument("GeneratorSystem: generator " + std::to_string(i + 1) +
                                        " has determinant != 1");
        if (is_identity(g) || is_identity(-g))
            throw std::invalid_argument("GeneratorSystem: generator " + std::to_string(i + 1) +
                                        " is +-identity");
        gens_.push_back(g);
        gens_.push_back(inverse(g));
        inverse_of_.push_back(static_cast<Letter>(2 * i + 1));
        inverse_of_.push_back(static_cast<Letter>(2 * i));
    }
    for (std::size_t i = 0; i < gens_.size(); ++i)
        for (std::size_t j = i + 1; j < gens_.size(); ++j)
            if (gens_[i] == gens_[j])
                throw std::invalid_argument(
                    "GeneratorSystem: alphabet letters " + std::to_string(i) + " and " +
                    std::to_string(j) + " coincide (duplicate or mutually inverse input)");
}

bool GeneratorSystem::is_admissible(const Word& w) const {
    for (std::size_t t = 0; t + 1 < w.size(); ++t) {
        if (w[t] >= gens_.size() || w[t + 1] >= gens_.size()) return false;
        if (!transition(w[t], w[t + 1])) return false;
    }
    return w.empty() || w.back() < gens_.size();
}

std::vector<Letter> GeneratorSystem::continuations(int last) const {
    std::vector<Letter> out;
    for (Letter j = 0; j < gens_.size(); ++j)
        if (last < 0 || transition(static_cast<Letter>(last), j)) out.push_back(j);
    return out;
}

Mat2Z word_to_matrix(const GeneratorSystem& s, const Word& w) {
    if (!s.is_admissible(w))
        throw std::invalid_argument("word_to_matrix: inadmissible word");
    Mat2Z m;
    for (Letter l : w) m = s.generator(l) * m;
    return m;
}

}  // namespace thinlab
