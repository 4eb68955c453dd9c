#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "thinlab/ball.hpp"
#include "thinlab/sieve.hpp"

using namespace thinlab;

namespace {

const BallEnumeration& modular_ball_200() {
    static const BallEnumeration ball = enumerate_ball(testing::modular_group(), 200.0);
    return ball;
}

OrbitPolynomial entry_poly(const std::string& text, int t) {
    return OrbitPolynomial{MatrixPolynomial::parse(text), t, 1};
}

}  // namespace

TEST_CASE("polynomial parsing and evaluation") {
    CHECK(MatrixPolynomial::parse("x12").eval(Mat2Z(1, 2, 0, 1)) == 2);
    CHECK(MatrixPolynomial::parse("x11*x12").eval(Mat2Z{}) == 0);
    CHECK(MatrixPolynomial::parse("x11").eval(Mat2Z(5, 2, 2, 1)) == 5);
    CHECK(MatrixPolynomial::parse("x11^2 - 3*x12*(x21 + 1)").eval(Mat2Z(5, 2, 2, 1)) ==
          25 - 3 * 2 * 3);
    CHECK(MatrixPolynomial::parse("-x21 + 2").eval(Mat2Z(5, 2, 2, 1)) == 0);
    CHECK(MatrixPolynomial::parse("x22^3").eval_mod(ModMat2{1, 0, 0, 4}, 7) == 64 % 7);

    CHECK_THROWS_AS(MatrixPolynomial::parse("x13"), std::invalid_argument);
    CHECK_THROWS_AS(MatrixPolynomial::parse("x11 +"), std::invalid_argument);
    CHECK_THROWS_AS(MatrixPolynomial::parse("(x11"), std::invalid_argument);
    CHECK_THROWS_AS(MatrixPolynomial::parse("x11 x12"), std::invalid_argument);
}

TEST_CASE("weak primitivity normalization") {
    const auto& ball = modular_ball_200();
    const auto s = testing::modular_group();

    const OrbitPolynomial doubled =
        normalize_primitive(MatrixPolynomial::parse("2*x12"), 1, s, ball);
    CHECK(doubled.normalization == 2);
    CHECK(doubled.eval(Mat2Z(1, 1, 0, 1)) == 1);

    const OrbitPolynomial plain =
        normalize_primitive(MatrixPolynomial::parse("x12"), 1, s, ball);
    CHECK(plain.normalization == 1);

    CHECK_THROWS_AS(normalize_primitive(MatrixPolynomial::parse("0"), 1, s, ball),
                    std::invalid_argument);
}

TEST_CASE("local densities: exact values and multiplicativity") {
    const auto s = testing::modular_group();
    const OrbitPolynomial f = entry_poly("x12", 1);

    // b = 0 in SL2(F_5): a d = 1 with c free, 20 of 120 elements
    CHECK(local_density(s, f, SquareFreeModulus::make(5)) == mpq_class(1, 6));
    CHECK(local_density(s, f, SquareFreeModulus::make(1)) == 1);

    // independent CRT oracle: count zeros over the SL2(Z/15) table directly
    const auto q15 = SquareFreeModulus::make(15);
    const ResidueGroup g15(s, q15);
    REQUIRE(g15.is_full());
    std::uint64_t zeros = 0;
    for (const ModMat2& m : g15.elements())
        if (m.b == 0) ++zeros;
    mpq_class direct(zeros, g15.size());
    direct.canonicalize();
    CHECK(local_density(s, f, q15) == direct);
    CHECK(local_density(s, f, q15) ==
          local_density(s, f, SquareFreeModulus::make(3)) *
              local_density(s, f, SquareFreeModulus::make(5)));

    // beta(p) = 1/(p+1) for the entry polynomial on the full group
    for (std::uint32_t p : {2u, 3u, 7u, 11u, 53u})
        CHECK(local_density(s, f, SquareFreeModulus::make(p)) == mpq_class(1, p + 1));

    // proper closures are counted over the stored table
    const auto schottky = testing::schottky();
    const ResidueGroup closure5(schottky, SquareFreeModulus::make(5));
    REQUIRE_FALSE(closure5.is_full());
    std::uint64_t table_zeros = 0;
    for (const ModMat2& m : closure5.elements())
        if (m.b == 0) ++table_zeros;
    mpq_class table_beta(table_zeros, closure5.size());
    table_beta.canonicalize();
    CHECK(local_density(schottky, f, SquareFreeModulus::make(5)) == table_beta);
}

TEST_CASE("sieve sequences: totals, progression sums, remainders") {
    const auto s = testing::modular_group();
    const auto& ball = modular_ball_200();
    const OrbitPolynomial f = entry_poly("x12", 1);
    const SieveSequence seq = build_sieve_sequence(s, ball, 200.0, f, {});

    CHECK(seq.ball_count == ball.count());
    CHECK(seq.ball_count == seq.zero_count + seq.X + seq.unresolved);
    CHECK(seq.unresolved == 0);
    CHECK(seq.zero_count > 0);   // b = 0 happens (powers of the lower generator)

    CHECK(seq.progression_sum(1) == seq.X);
    for (std::uint64_t d : {2ULL, 3ULL, 5ULL, 7ULL})
        CHECK(seq.progression_sum(d) <= seq.X);

    // |r(A, 5)| / X < 0.05 at T = 200
    const double r5 = static_cast<double>(seq.progression_sum(5)) -
                      mpq_class(1, 6).get_d() * static_cast<double>(seq.X);
    CHECK(std::fabs(r5) / static_cast<double>(seq.X) < 0.05);

    const auto rows = remainder_table(s, seq, f, 30.0, 30);
    REQUIRE(!rows.empty());
    CHECK(rows[0].d == 1);
    CHECK(rows[0].remainder == doctest::Approx(0.0));
    for (const auto& row : rows) {
        CHECK(row.beta > 0);
        CHECK(row.beta <= 1);
        if (row.d > 1) {
            CHECK(row.beta < 1);
            CHECK(std::fabs(row.remainder) / static_cast<double>(seq.X) < 0.1);
        }
    }
}

TEST_CASE("sieve dimension defect stays bounded") {
    const auto s = testing::modular_group();
    const OrbitPolynomial f = entry_poly("x12", 1);

    // no primes in [8, 10]: the defect degenerates to t log(z/w)
    CHECK(dimension_check_defect(s, f, 8.0, 10.0, {}) ==
          doctest::Approx(std::log(10.0 / 8.0)).epsilon(1e-12));

    const double d50 = dimension_check_defect(s, f, 2.0, 50.0, {});
    CHECK(d50 < 1.5);
    const double d100 = dimension_check_defect(s, f, 2.0, 100.0, {});
    const double d200 = dimension_check_defect(s, f, 2.0, 200.0, {});
    CHECK(d100 < 1.5);
    CHECK(d200 < 1.5);

    // t = 2: both entries divisible, beta(p) = 2/(p+1); the defect stays
    // bounded with no drift as z doubles
    const OrbitPolynomial g = entry_poly("x11*x12", 2);
    CHECK(local_density(s, g, SquareFreeModulus::make(5)) == mpq_class(1, 3));
    std::vector<double> defects;
    for (double z : {50.0, 100.0, 200.0})
        defects.push_back(dimension_check_defect(s, g, 2.0, z, {}));
    for (double d : defects) CHECK(d < 2.5);
    CHECK(std::fabs(defects.back() - defects.front()) < 0.5);
}

TEST_CASE("A1 shadow: remainder sums shrink as T grows at fixed level") {
    const auto s = testing::modular_group();
    const OrbitPolynomial f = entry_poly("x12", 1);
    std::vector<double> sums;
    for (double T : {60.0, 120.0, 240.0}) {
        const auto ball = enumerate_ball(s, T);
        const SieveSequence seq = build_sieve_sequence(s, ball, T, f, {});
        const auto rows = remainder_table(s, seq, f, 60.0, 60);
        double sum = 0.0;
        for (const auto& row : rows) sum += std::fabs(row.remainder);
        sums.push_back(sum / static_cast<double>(seq.X));
    }
    CHECK(sums[1] < sums[0]);
    CHECK(sums[2] < sums[1]);
}

TEST_CASE("exact sifted sums and the Brun bracket") {
    const auto s = testing::modular_group();
    const auto& ball = modular_ball_200();
    const OrbitPolynomial f = entry_poly("x12", 1);
    const SieveSequence seq = build_sieve_sequence(s, ball, 200.0, f, {});

    // z below every prime: nothing is sifted
    CHECK(exact_sifted_sum(seq, 1.5) == seq.X);

    // z = 2: the surviving values are the odd ones; count them directly
    std::uint64_t odd = 0;
    for (const auto& [n, a_n] : seq.values)
        if (n % 2 == 1) odd += a_n;
    CHECK(exact_sifted_sum(seq, 2.0) == odd);

    std::uint64_t prev = seq.X;
    for (double z : {2.0, 3.0, 5.0, 7.0, 11.0}) {
        const std::uint64_t cur = exact_sifted_sum(seq, z);
        CHECK(cur <= prev);
        prev = cur;
    }

    const double D = std::pow(7.0, 10);
    const BrunBounds bounds = fundamental_lemma_bounds(seq, 7.0, D, 1);
    const std::uint64_t exact = exact_sifted_sum(seq, 7.0);
    CHECK(bounds.lower <= static_cast<double>(exact));
    CHECK(static_cast<double>(exact) <= bounds.upper);

    // z = 1: both bounds collapse to X
    const BrunBounds trivial = fundamental_lemma_bounds(seq, 1.0, 7.0, 1);
    CHECK(trivial.lower == static_cast<double>(seq.X));
    CHECK(trivial.upper == static_cast<double>(seq.X));

    // s <= 9t is rejected
    CHECK_THROWS_AS(fundamental_lemma_bounds(seq, 7.0, 100.0, 1), std::invalid_argument);
}

TEST_CASE("almost-prime tables partition the ball") {
    const auto s = testing::modular_group();
    const auto& ball = modular_ball_200();
    const OrbitPolynomial f = entry_poly("x12", 1);
    const SieveSequence seq = build_sieve_sequence(s, ball, 200.0, f, {});
    const AlmostPrimeTable table = almost_prime_table(seq);

    CHECK(table.total() == seq.ball_count);
    CHECK(table.zero == seq.zero_count);

    // r = 0 counts value 1 exactly (b = 1 elements)
    std::uint64_t ones = seq.values.count(1) ? seq.values.at(1) : 0;
    CHECK(table.at_most(0) == ones);
    for (int r = 1; r < 6; ++r) CHECK(table.at_most(r) >= table.at_most(r - 1));

    // primes are the r = 1 class beyond the units
    const std::uint64_t primes = prime_count(s, ball, {f});
    CHECK(primes == table.at_most(1) - table.at_most(0));
    CHECK(table.at_most(2) >= primes);
}

TEST_CASE("factorization helpers") {
    CHECK(prime_omega(1) == 0);
    CHECK(prime_omega(2) == 1);
    CHECK(prime_omega(12) == 3);
    CHECK(prime_omega(1024) == 10);
    CHECK(prime_omega(104729) == 1);
    CHECK(prime_omega(999983ULL * 2) == 2);
    CHECK(prime_omega(1000003ULL * 1000033ULL) == 2);   // forces the rho split
    CHECK_THROWS_AS(prime_omega(0), std::invalid_argument);

    // against a sieve of small numbers
    std::vector<bool> is_comp(10000, false);
    for (std::uint64_t p = 2; p < 10000; ++p) {
        if (is_comp[p]) continue;
        for (std::uint64_t m = p * p; m < 10000; m += p) is_comp[m] = true;
    }
    for (std::uint64_t n = 2; n < 10000; ++n) CHECK(is_prime_u64(n) == !is_comp[n]);
}

TEST_CASE("prime counting on the orbit") {
    const auto s = testing::modular_group();
    const auto ball = enumerate_ball(s, 50.0);
    REQUIRE(ball.count() == 14788);
    const OrbitPolynomial f = entry_poly("x12", 1);
    const std::uint64_t primes = prime_count(s, ball, {f});
    CHECK(primes == 6836);   // recorded on the first run
    CHECK(primes < ball.count());

    // two declared factors: both entries prime simultaneously
    const std::uint64_t pairs =
        prime_count(s, ball, {entry_poly("x11", 1), entry_poly("x12", 1)});
    CHECK(pairs <= primes);
    CHECK_THROWS_AS(prime_count(s, ball, {}), std::invalid_argument);
}
