#pragma once

// Integer polynomials in the four matrix entries x11, x12, x21, x22, parsed
// from a tiny expression grammar:
//
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := base ('^' uint)?
//   base   := integer | x11 | x12 | x21 | x22 | '(' expr ')'

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "thinlab/mat2.hpp"
#include "thinlab/residue.hpp"

namespace thinlab {

class MatrixPolynomial {
public:
    static MatrixPolynomial parse(const std::string& text);

    mpz_class eval(const Mat2Z& g) const;
    // value mod p for a residue matrix
    std::uint64_t eval_mod(const ModMat2& m, std::uint64_t p) const;
    // value mod p from four residues
    std::uint64_t eval_mod(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d,
                           std::uint64_t p) const;

    const std::string& text() const { return text_; }

    struct Node;   // implementation detail, public for the parser

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace thinlab
