#pragma once

// The affine linear sieve on a group ball: weights a_n, local densities
// beta(d), the sieve axioms at desk scale, Brun's pure combinatorial sieve
// bounds for S(A, P_z), and almost-prime tabulation of orbit values.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "thinlab/ball.hpp"
#include "thinlab/poly.hpp"
#include "thinlab/residue.hpp"

namespace thinlab {

struct OrbitPolynomial {
    MatrixPolynomial f;
    int declared_t = 1;              // declared number of irreducible factors
    mpz_class normalization = 1;     // N = gcd of f over the sampled orbit

    mpz_class eval(const Mat2Z& g) const;   // f(g) / N, exact
};

// Divides f by the gcd of its values over >= `sample_size` orbit points and
// re-verifies weak primitivity on a fresh disjoint sample. Throws if f
// vanishes identically on the sample.
OrbitPolynomial normalize_primitive(const MatrixPolynomial& f, int declared_t,
                                    const GeneratorSystem& s, const BallEnumeration& ball,
                                    std::size_t sample_size = 1000);

// beta(d) = |{x in Lambda_d : f(x) = 0 mod d}| / |Lambda_d| for square-free d
// coprime to the bad primes; exact rational, multiplicative over the prime
// factors. Full closures are counted by direct SL2(F_p) enumeration, proper
// closures over the stored table.
mpq_class local_density(const GeneratorSystem& s, const OrbitPolynomial& f,
                        const SquareFreeModulus& d);

struct SieveSequence {
    double T = 0.0;
    std::uint64_t ball_count = 0;            // all elements of the ball
    std::uint64_t zero_count = 0;            // elements with f = 0, excluded from a_n
    std::uint64_t X = 0;                     // sum of a_n over n >= 1
    std::map<std::uint64_t, std::uint64_t> values;   // n -> a_n (n >= 1, 64-bit values)
    std::uint64_t unresolved = 0;            // |f| beyond 64 bits
    std::vector<std::uint32_t> excluded_primes;      // B

    std::uint64_t progression_sum(std::uint64_t d) const;   // sum of a_n over d | n
};

SieveSequence build_sieve_sequence(const GeneratorSystem& s, const BallEnumeration& ball,
                                   double T, const OrbitPolynomial& f,
                                   const std::vector<std::uint32_t>& excluded_primes);

struct RemainderRow {
    std::uint64_t d = 1;
    std::uint64_t progression_sum = 0;
    mpq_class beta;
    double remainder = 0.0;          // progression_sum - beta * X
};

// Exact remainders r(A, d) for square-free d <= min(D, exact cap) with all
// prime factors <= beta_prime_cap, off the excluded primes.
std::vector<RemainderRow> remainder_table(const GeneratorSystem& s, const SieveSequence& seq,
                                          const OrbitPolynomial& f, double D,
                                          std::uint32_t beta_prime_cap = 300);

// |sum over w <= p <= z (off B) of beta(p) log p  -  t log(z / w)|
double dimension_check_defect(const GeneratorSystem& s, const OrbitPolynomial& f,
                              double w, double z,
                              const std::vector<std::uint32_t>& excluded_primes);

// S(A, P_z): exact count of weights with value coprime to every prime <= z
// off the excluded set.
std::uint64_t exact_sifted_sum(const SieveSequence& seq, double z);

struct BrunBounds {
    double lower = 0.0;
    double upper = 0.0;
    int truncation = 0;              // max number of prime factors used
    double s_parameter = 0.0;        // log D / log z
};

// Truncated inclusion-exclusion over square-free d | P_z with d <= D and at
// most ceil(9t)+1 prime factors; even truncation bounds from above, odd from
// below. Requires s = log D / log z > 9t.
BrunBounds fundamental_lemma_bounds(const SieveSequence& seq, double z, double D, int t);

struct AlmostPrimeTable {
    std::uint64_t zero = 0;                        // f = 0 bucket
    std::map<int, std::uint64_t> exact_counts;     // r -> #elements with Omega(|f|) = r
    std::uint64_t unresolved = 0;

    std::uint64_t at_most(int r) const;            // cumulative, values >= 1 only
    std::uint64_t total() const;
};

AlmostPrimeTable almost_prime_table(const SieveSequence& seq);

// pi_{Lambda, f}(T) for f given in declared factored form: counts ball
// elements where every factor value is prime in absolute value.
std::uint64_t prime_count(const GeneratorSystem& s, const BallEnumeration& ball,
                          const std::vector<OrbitPolynomial>& factors);

// Omega(n) with multiplicity for 0 < n < 2^62; deterministic.
int prime_omega(std::uint64_t n);
bool is_prime_u64(std::uint64_t n);

}  // namespace thinlab
