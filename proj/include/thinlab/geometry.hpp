#pragma once

// Upper half-plane model: distance, the point-pair invariant u, Mobius
// action, and the exact norm--distance identity  ||g||^2 = 4 u(gi, i) + 2.
//
// Two coordinate types are used. UpperHalfPoint carries doubles and backs
// the floating operations. RationalPoint carries exact rationals; orbits of
// rational points under integer Mobius maps stay rational, which keeps the
// distance cocycle evaluation exact until the final arccosh.

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>

#include "thinlab/mat2.hpp"

namespace thinlab {

struct UpperHalfPoint {
    double x = 0.0;
    double y = 1.0;

    UpperHalfPoint() = default;
    UpperHalfPoint(double x_, double y_) : x(x_), y(y_) {
        if (!(y > 0.0)) throw std::invalid_argument("UpperHalfPoint: y must be > 0");
    }
};

struct RationalPoint {
    mpq_class x;
    mpq_class y;   // > 0

    RationalPoint() : x(0), y(1) {}
    RationalPoint(mpq_class x_, mpq_class y_) : x(std::move(x_)), y(std::move(y_)) {
        if (!(this->y > 0)) throw std::invalid_argument("RationalPoint: y must be > 0");
    }
};

// u(z, w) = |z - w|^2 / (4 Im z Im w)
inline double point_pair_u(const UpperHalfPoint& z, const UpperHalfPoint& w) {
    const double dx = z.x - w.x;
    const double dy = z.y - w.y;
    return (dx * dx + dy * dy) / (4.0 * z.y * w.y);
}

inline mpq_class point_pair_u(const RationalPoint& z, const RationalPoint& w) {
    const mpq_class dx = z.x - w.x;
    const mpq_class dy = z.y - w.y;
    return (dx * dx + dy * dy) / (4 * z.y * w.y);
}

// log of an exact positive rational, stable for values far beyond double range.
double log_mpq(const mpq_class& q);

// arccosh(1 + 2u) for an exact nonnegative u.
double acosh_one_plus_2u(const mpq_class& u);

// rho(z, w) = log((|z-conj(w)| + |z-w|) / (|z-conj(w)| - |z-w|)),
// evaluated through cosh rho = 1 + 2u which is the same function.
double hyp_distance(const UpperHalfPoint& z, const UpperHalfPoint& w);

// The quotient formula itself, kept as an independent route for tests.
double hyp_distance_quotient_formula(const UpperHalfPoint& z, const UpperHalfPoint& w);

double hyp_distance(const RationalPoint& z, const RationalPoint& w);

// g.z = (az + b) / (cz + d)
UpperHalfPoint mobius_apply(const Mat2Z& g, const UpperHalfPoint& z);
RationalPoint mobius_apply(const Mat2Z& g, const RationalPoint& z);

// |  ||g||^2 - (4 u(g.i, i) + 2)  |  with u computed in exact rationals.
double norm_distance_residual(const Mat2Z& g);

// Hyperbolic distance from i to g.i, via cosh d = ||g||^2 / 2 (exact norm).
double distance_i_to_gi(const Mat2Z& g);

}  // namespace thinlab
