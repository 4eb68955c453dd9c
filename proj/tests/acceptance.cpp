// Acceptance suite: one check per shipped claim, each printed as a PASS or
// FAIL line with the measured values. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "thinlab/ball.hpp"
#include "thinlab/cayley.hpp"
#include "thinlab/congruence_transfer.hpp"
#include "thinlab/counting.hpp"
#include "thinlab/geometry.hpp"
#include "thinlab/residue.hpp"
#include "thinlab/sieve.hpp"
#include "thinlab/shift.hpp"
#include "thinlab/transfer.hpp"

using namespace thinlab;

namespace {

GeneratorSystem sanov() { return GeneratorSystem({Mat2Z(1, 2, 0, 1), Mat2Z(1, 0, 2, 1)}); }
GeneratorSystem schottky() { return GeneratorSystem({Mat2Z(3, 1, 2, 1), Mat2Z(11, -39, 2, -7)}); }
GeneratorSystem modular() { return GeneratorSystem({Mat2Z(1, 1, 0, 1), Mat2Z(1, 0, 1, 1)}); }

struct Result {
    bool pass = false;
    std::string detail;
};

Word random_word(const GeneratorSystem& s, int length, std::mt19937_64& rng) {
    Word w;
    std::uniform_int_distribution<int> pick(0, static_cast<int>(s.alphabet_size()) - 1);
    while (static_cast<int>(w.size()) < length) {
        const Letter j = static_cast<Letter>(pick(rng));
        if (!w.empty() && !s.transition(w.back(), j)) continue;
        w.push_back(j);
    }
    return w;
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

// 1. Norm-distance identity residual over random words.
Result criterion_norm_distance() {
    std::mt19937_64 rng(20260808);
    const GeneratorSystem systems[] = {sanov(), schottky(), modular()};
    std::uniform_int_distribution<int> len(1, 8);
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const auto& s = systems[trial % 3];
        const Mat2Z g = word_to_matrix(s, random_word(s, len(rng), rng));
        worst = std::max(worst, norm_distance_residual(g));
    }
    return Result{worst < 1e-9, fmt("max residual %.3e over 10^4 words (tolerance 1e-9)", worst)};
}

// 2. Ball enumeration equals the exhaustive word oracle.
Result criterion_ball_oracle() {
    const auto s = sanov();
    const auto ball = enumerate_ball(s, 20.0);
    std::vector<Mat2Z> mine;
    for (std::uint32_t idx : ball.in_ball) mine.push_back(ball.entries[idx].element);
    std::sort(mine.begin(), mine.end(), lex_less);
    const auto oracle = exhaustive_ball_oracle(s, 20.0, 12);
    bool equal = mine.size() == oracle.size();
    for (std::size_t i = 0; equal && i < mine.size(); ++i) equal = mine[i] == oracle[i];
    return Result{equal, fmt("T=20: enumerated %zu, oracle %zu, sets %s", mine.size(),
                             oracle.size(), equal ? "equal" : "DIFFER")};
}

// 3. Finite-index growth exponent: slope of log N over log T in [1.85, 2.15].
Result criterion_modular_slope() {
    const BallCountSeries series = orbit_count(modular(), geometric_ladder(20.0, 200.0, 1.2));
    const ExponentFit fit = exponent_fit(series);
    const bool pass = fit.slope >= 1.85 && fit.slope <= 2.15;
    return Result{pass, fmt("slope %.4f over T in [20,200] (target [1.85, 2.15])", fit.slope)};
}

// 4. Thermodynamic delta against the counting slope, plus depth stability.
Result criterion_cross_oracle() {
    const SubshiftSpec spec(schottky());
    const DeltaEstimate est = estimate_delta(spec, {7, 8});
    const double drift = est.last_drift();

    const BallCountSeries series =
        orbit_count(schottky(), geometric_ladder(100.0, 1.0e8, 1.3));
    const ExponentFit fit = exponent_fit(series);
    const double gap = std::fabs(2.0 * est.delta() - fit.slope);
    const bool pass = gap <= 0.05 && drift <= 2e-3;
    return Result{pass, fmt("2*delta=%.4f vs slope=%.4f (|diff|=%.4f <= 0.05), "
                            "drift(7->8)=%.2e <= 2e-3",
                            2.0 * est.delta(), fit.slope, gap, drift)};
}

// 5. Renewal identity: exact zero residual for all a <= 6.
Result criterion_renewal() {
    const SubshiftSpec spec(schottky());
    std::int64_t worst = 0;
    int checks = 0;
    for (double a = -1.0; a <= 6.0; a += 0.5) {
        for (const Word& x : {Word{}, Word{0}, Word{2}}) {
            const RenewalCheck check = renewal_identity_check(spec, a, x);
            worst = std::max<std::int64_t>(worst, std::llabs(check.residual()));
            ++checks;
        }
    }
    return Result{worst == 0, fmt("max |residual| = %lld over %d (a, x) pairs (exact 0 required)",
                                  static_cast<long long>(worst), checks)};
}

// 6. Transfer operator: lambda(0) = 2k-1 exactly, monotone lambda, positive h.
Result criterion_transfer_exactness() {
    const SubshiftSpec spec(schottky());
    auto grid = std::make_shared<const CylinderGrid>(spec, 5);
    const PerronTriple at_zero = leading_eigentriple(TransferOperator(grid, 0.0));
    const double err = std::fabs(at_zero.lambda - 3.0);

    bool decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double lambda = leading_eigenvalue(TransferOperator(grid, s));
        decreasing = decreasing && (lambda < prev);
        prev = lambda;
    }
    const bool positive = at_zero.h.minCoeff() > 0.0;
    const bool pass = err < 1e-12 && decreasing && positive;
    return Result{pass, fmt("|lambda(0)-3| = %.2e (<1e-12), strictly decreasing: %s, "
                            "min h = %.3e > 0",
                            err, decreasing ? "yes" : "NO", at_zero.h.minCoeff())};
}

// 7. Frobenius multiplicity bound at p = 5 and p = 7.
Result criterion_multiplicity() {
    std::string detail;
    bool pass = true;
    for (std::uint32_t p : {5u, 7u}) {
        const AveragingOperator op(sanov(), SquareFreeModulus::make(p));
        const MultiplicityReport rep = multiplicity_check(op, 1e-8);
        int min_mult = 1 << 20;
        for (const auto& [value, mult] : rep.clusters) min_mult = std::min(min_mult, mult);
        pass = pass && rep.ok;
        detail += fmt("p=%u: min multiplicity %d (needs >= %d)  ", p, min_mult, rep.required);
    }
    return Result{pass, detail};
}

// 8. Expander shadow: positive gaps and the flattening limit.
Result criterion_expander_shadow() {
    bool pass = true;
    std::string detail;
    for (std::uint32_t p : {5u, 7u, 11u, 13u}) {
        const AveragingOperator op(sanov(), SquareFreeModulus::make(p));
        const SpectrumReport rep = spectral_gap(op);
        pass = pass && rep.gap > 0.01;
        detail += fmt("gap(%u)=%.3f ", p, rep.gap);
    }
    const auto profile = flattening_profile(sanov(), SquareFreeModulus::make(13), 500);
    bool monotone = true;
    for (std::size_t l = 1; l < profile.size(); ++l)
        monotone = monotone && profile[l] <= profile[l - 1] + 1e-12;
    const double target = 1.0 / std::sqrt(2184.0);
    const double limit_err = std::fabs(profile.back() - target);
    pass = pass && monotone && limit_err <= 1e-8;
    detail += fmt("; flattening monotone: %s, |limit - |G|^{-1/2}| = %.2e (<=1e-8)",
                  monotone ? "yes" : "NO", limit_err);
    return Result{pass, detail};
}

// 9. Congruence sector gap at q = 3.
Result criterion_sector_gap() {
    const SubshiftSpec spec(schottky());
    const double delta = estimate_delta(spec, {6}).delta();
    const SectorGapReport rep = congruence_sector_gap(spec, 5, 3, delta);
    const bool pass = rep.ratio < 0.999;
    return Result{pass, fmt("sector radius %.4f / lambda %.6f = ratio %.4f (< 0.999)",
                            rep.sector_radius, rep.lambda, rep.ratio)};
}

// 10. Congruence equidistribution at q = 3, T = 200.
Result criterion_equidistribution() {
    const auto s = modular();
    const auto ball = enumerate_ball(s, 200.0);
    const CongruenceCountTable table = congruence_count(s, ball, SquareFreeModulus::make(3));
    std::uint64_t sum = 0;
    for (auto c : table.class_counts) sum += c;
    const bool pass = table.classes_hit == 24 && table.max_relative_deviation < 0.2 &&
                      sum == ball.count();
    return Result{pass, fmt("classes hit %zu/24, max deviation %.4f (< 0.2), partition %s",
                            table.classes_hit, table.max_relative_deviation,
                            sum == ball.count() ? "exact" : "BROKEN")};
}

// 11. Local density exactness at 5 and multiplicativity at 15.
Result criterion_local_density() {
    const auto s = modular();
    const OrbitPolynomial f{MatrixPolynomial::parse("x12"), 1, 1};
    const mpq_class b5 = local_density(s, f, SquareFreeModulus::make(5));
    const mpq_class b3 = local_density(s, f, SquareFreeModulus::make(3));
    const mpq_class b15 = local_density(s, f, SquareFreeModulus::make(15));
    const bool pass = (b5 == mpq_class(1, 6)) && (b15 == b3 * b5);
    return Result{pass, fmt("beta(5) = %s (= 1/6), beta(15) %s beta(3)*beta(5)",
                            b5.get_str().c_str(), b15 == b3 * b5 ? "==" : "!=")};
}

// 12. Sieve dimension axiom for the entry polynomial.
Result criterion_dimension_defect() {
    const OrbitPolynomial f{MatrixPolynomial::parse("x12"), 1, 1};
    const double defect = dimension_check_defect(modular(), f, 2.0, 50.0, {});
    return Result{defect <= 1.5, fmt("|sum beta(p) log p - log 25| = %.4f (<= 1.5)", defect)};
}

// 13 & 14. Brun bracketing, normalized upper bound stability, and the
// almost-prime partition, across T in {100, 200, 400}.
Result criterion_brun_and_partition(Result& partition_out) {
    const auto s = modular();
    const OrbitPolynomial f{MatrixPolynomial::parse("x12"), 1, 1};
    const double z = 7.0, D = std::pow(7.0, 10);
    BallOptions opt;
    opt.element_budget = 20'000'000;

    bool bracket_ok = true, partition_ok = true;
    double norm_min = std::numeric_limits<double>::infinity(), norm_max = 0.0;
    std::string detail, partition_detail;
    for (double T : {100.0, 200.0, 400.0}) {
        const auto ball = enumerate_ball(s, T, opt);
        const SieveSequence seq = build_sieve_sequence(s, ball, T, f, {});
        const std::uint64_t exact = exact_sifted_sum(seq, z);
        const BrunBounds bounds = fundamental_lemma_bounds(seq, z, D, 1);
        const bool bracket = bounds.lower <= static_cast<double>(exact) &&
                             static_cast<double>(exact) <= bounds.upper;
        bracket_ok = bracket_ok && bracket;
        const double normalized =
            bounds.upper * std::log(static_cast<double>(seq.X)) / static_cast<double>(seq.X);
        norm_min = std::min(norm_min, normalized);
        norm_max = std::max(norm_max, normalized);
        detail += fmt("T=%g: %.0f <= %llu <= %.0f  ", T, bounds.lower,
                      static_cast<unsigned long long>(exact), bounds.upper);

        const AlmostPrimeTable table = almost_prime_table(seq);
        const bool partition = table.total() == seq.ball_count && table.unresolved == 0;
        partition_ok = partition_ok && partition;
        partition_detail += fmt("T=%g: zero %llu + classified %llu = %llu (%s)  ", T,
                                static_cast<unsigned long long>(table.zero),
                                static_cast<unsigned long long>(table.total() - table.zero),
                                static_cast<unsigned long long>(seq.ball_count),
                                partition ? "exact" : "BROKEN");
    }
    const double spread = norm_max / norm_min;
    const bool pass = bracket_ok && spread < 3.0;
    partition_out = Result{partition_ok, partition_detail};
    return Result{pass, detail + fmt("; normalized upper spread %.2f (< 3)", spread)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<Result()> run;
    };

    Result partition_result;
    bool partition_ready = false;

    const std::vector<Criterion> criteria = {
        {1, "norm-distance identity residual", criterion_norm_distance},
        {2, "ball enumeration oracle equivalence", criterion_ball_oracle},
        {3, "finite-index growth exponent", criterion_modular_slope},
        {4, "cross-oracle delta consistency", criterion_cross_oracle},
        {5, "exact renewal identity", criterion_renewal},
        {6, "transfer operator exactness", criterion_transfer_exactness},
        {7, "Frobenius multiplicity bound", criterion_multiplicity},
        {8, "expander shadow and flattening", criterion_expander_shadow},
        {9, "congruence sector gap", criterion_sector_gap},
        {10, "congruence equidistribution", criterion_equidistribution},
        {11, "local density exactness", criterion_local_density},
        {12, "sieve dimension defect", criterion_dimension_defect},
        {13, "fundamental lemma bracketing",
         [&] {
             Result out = criterion_brun_and_partition(partition_result);
             partition_ready = true;
             return out;
         }},
        {14, "almost-prime partition",
         [&] {
             if (!partition_ready) criterion_brun_and_partition(partition_result);
             return partition_result;
         }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Result result;
        try {
            result = c.run();
        } catch (const std::exception& e) {
            result = Result{false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %2d: %s -- %s [%.1fs]\n", result.pass ? "PASS" : "FAIL", c.id,
                    c.title, result.detail.c_str(), seconds);
        std::fflush(stdout);
        if (!result.pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    else std::printf("all %zu criteria passed\n", criteria.size());
    return failures;
}
