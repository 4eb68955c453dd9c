#pragma once

// Reductions mod square-free q: the residue group Lambda_q, its closure by
// breadth-first multiplication, SL2(Z/qZ) orders, the bad-prime scan behind
// strong approximation, and the CRT surjectivity check.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "thinlab/generators.hpp"
#include "thinlab/mat2.hpp"

namespace thinlab {

struct SquareFreeModulus {
    std::uint32_t q = 1;
    std::vector<std::uint32_t> prime_factors;   // sorted, distinct

    // Factors and validates; throws on q == 0 or non-square-free q.
    static SquareFreeModulus make(std::uint64_t q);
};

struct ModMat2 {
    // residues in [0, q)
    std::uint32_t a = 1, b = 0, c = 0, d = 1;

    bool operator==(const ModMat2&) const = default;
    std::uint64_t key() const {
        return (std::uint64_t(a) << 48) | (std::uint64_t(b) << 32) |
               (std::uint64_t(c) << 16) | std::uint64_t(d);
    }
};

ModMat2 reduce_mod(const Mat2Z& g, const SquareFreeModulus& q);
ModMat2 mod_mul(const ModMat2& x, const ModMat2& y, std::uint32_t q);
ModMat2 mod_inverse(const ModMat2& x, std::uint32_t q);

// Exact |SL2(Z/qZ)| by per-prime brute-force counting, multiplied by CRT.
std::uint64_t sl2_order(const SquareFreeModulus& q);
// Closed form p(p^2 - 1) per prime; cross-check only.
std::uint64_t sl2_order_closed_form(const SquareFreeModulus& q);

class ResidueGroup {
public:
    // BFS closure of the reduced generators under multiplication.
    ResidueGroup(const GeneratorSystem& s, const SquareFreeModulus& q);

    const SquareFreeModulus& modulus() const { return q_; }
    std::size_t size() const { return elements_.size(); }
    bool is_full() const { return is_full_; }
    const std::vector<ModMat2>& elements() const { return elements_; }
    const ModMat2& element(std::size_t i) const { return elements_[i]; }

    // Exact lookup; throws if absent (not in the closure).
    std::uint32_t index_of(const ModMat2& m) const;
    std::optional<std::uint32_t> try_index_of(const ModMat2& m) const;
    std::uint32_t identity_index() const { return id_index_; }

    // index of generator(l) reduced mod q, for each alphabet letter
    const std::vector<std::uint32_t>& generator_images() const { return gen_images_; }

    // Left-translation table for alphabet letter l: row[i] = index(g_l * e_i).
    std::vector<std::uint32_t> left_action(Letter l) const;
    // Left translation by an arbitrary group index.
    std::vector<std::uint32_t> left_action_of(std::uint32_t gi) const;
    std::vector<std::uint32_t> inverse_table() const;

private:
    SquareFreeModulus q_;
    std::vector<ModMat2> elements_;             // sorted by (a,b,c,d): dense lex index
    std::unordered_map<std::uint64_t, std::uint32_t> index_;
    std::vector<std::uint32_t> gen_images_;
    std::uint32_t id_index_ = 0;
    bool is_full_ = false;
};

struct BadPrimeReport {
    std::uint32_t prime_bound = 0;
    std::vector<std::uint32_t> bad_primes;          // closure not full
    std::vector<std::pair<std::uint32_t, std::uint64_t>> closure_sizes;  // (p, |Lambda_p|)

    bool contains(std::uint32_t p) const {
        for (auto b : bad_primes)
            if (b == p) return true;
        return false;
    }
};

// Primes p <= prime_bound with Lambda_p a proper subgroup of SL2(F_p).
BadPrimeReport strong_approximation_scan(const GeneratorSystem& s, std::uint32_t prime_bound);

// Fullness of the closure mod a prime without materializing the whole table:
// every proper subgroup of SL2(F_p) has order at most
// max(120, 2(p+1), p(p-1)), so the closure BFS stops as soon as it passes
// that bound.
bool closure_is_full(const GeneratorSystem& s, std::uint32_t p);

// Goursat criterion at desk scale: |Lambda_{q1 q2}| == |Lambda_{q1}| * |Lambda_{q2}|.
// Throws if q1, q2 are not coprime.
bool crt_surjectivity_check(const GeneratorSystem& s, const SquareFreeModulus& q1,
                            const SquareFreeModulus& q2);

std::vector<std::uint32_t> primes_up_to(std::uint32_t bound);

}  // namespace thinlab
