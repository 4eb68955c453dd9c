#pragma once

// Orbit counting N(T), the log-log exponent fit against c T^{2 delta},
// per-class congruence counts, the exact renewal identity at desk scale,
// and smoothed counts against a compactly supported bump kernel.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "thinlab/ball.hpp"
#include "thinlab/residue.hpp"
#include "thinlab/shift.hpp"

namespace thinlab {

struct BallCountSeries {
    std::vector<double> thresholds;        // increasing T ladder
    std::vector<std::uint64_t> counts;     // N(T_j), exact
    std::vector<double> distances;         // a_j = arccosh(T_j^2 / 2): distance variable
    bool truncated = false;
};

struct ExponentFit {
    double slope = 0.0;        // fitted 2 delta
    double intercept = 0.0;    // fitted log c
    double max_residual = 0.0;
    std::size_t points_used = 0;
};

// Geometric ladder from t_min to t_max with the given ratio (> 1).
std::vector<double> geometric_ladder(double t_min, double t_max, double ratio);

// Exact counts from one enumeration at the top of the ladder.
BallCountSeries orbit_count(const GeneratorSystem& s, const std::vector<double>& ladder,
                            const BallOptions& opt = {});
BallCountSeries orbit_count(const BallEnumeration& ball, const std::vector<double>& ladder);

// Least squares on (log T, log N) past the burn-in quantile (default: drop
// the lowest fifth of the ladder). Throws if fewer than 5 points remain.
ExponentFit exponent_fit(const BallCountSeries& series, double burn_in_quantile = 0.2);

struct CongruenceCountTable {
    std::uint32_t q = 1;
    std::uint64_t total = 0;                  // N(T)
    std::vector<std::uint64_t> class_counts;  // indexed like the ResidueGroup
    std::size_t classes_hit = 0;
    double max_relative_deviation = 0.0;      // max over classes of |count * m / N - 1|
    double l2_deviation = 0.0;
};

CongruenceCountTable congruence_count(const GeneratorSystem& s, const BallEnumeration& ball,
                                      const SquareFreeModulus& q);

// --- renewal identity -----------------------------------------------------

// Both sides of N(a, x) = sum over one-letter extensions x' of
// N(a - tau(x'), x') + phi(x) 1{a >= 0}, each side summed independently over
// exhaustive admissible words. Distances are quantized to the dyadic grid
// 2^-40 so the threshold arithmetic is exact and the residual is an exact
// integer when phi = 1.
//
// Branches are abandoned once the orbit point is 10 units past the
// threshold; a word is assumed not to return from that far out (true for
// purely hyperbolic systems, where tau > 0). The horizon error fires if the
// word-length cap is reached while a branch is still within that margin.
struct RenewalCheck {
    std::int64_t lhs = 0;
    std::int64_t rhs = 0;
    std::int64_t residual() const { return lhs - rhs; }
};

RenewalCheck renewal_identity_check(const SubshiftSpec& spec, double a, const Word& x,
                                    int max_extra_length = 64);

// --- smoothing kernel ------------------------------------------------------

// k_gamma(t) = (1/gamma) K(t/gamma) with K proportional to
// exp(-1/(1 - 4t^2)) on [-1/2, 1/2], normalized to unit mass.
class BumpKernel {
public:
    explicit BumpKernel(double gamma);

    double gamma() const { return gamma_; }
    double density(double t) const;                  // k_gamma(t)
    double mass() const;                             // quadrature of density, ~1
    double cdf(double t) const;                      // integral of k_gamma up to t

private:
    double gamma_;
};

// Quadrature of k_gamma against the exact step function a -> N(a + t; q, xi)
// built from the enumerated orbit; class_index < 0 means no congruence
// restriction. Result lies between N(a - gamma/2) and N(a + gamma/2).
double smoothed_count(const GeneratorSystem& s, const BallEnumeration& ball,
                      const BumpKernel& kernel, double a,
                      const SquareFreeModulus& q, std::int64_t class_index);

// The distance values a(gamma) = arccosh(||gamma||^2 / 2) of ball elements,
// optionally restricted to a congruence class, sorted ascending.
std::vector<double> orbit_distance_values(const GeneratorSystem& s, const BallEnumeration& ball,
                                          const SquareFreeModulus& q, std::int64_t class_index);

}  // namespace thinlab
