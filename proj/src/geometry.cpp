#include "thinlab/geometry.hpp"

#include <cmath>

namespace thinlab {

double log_mpq(const mpq_class& q) {
    if (!(q > 0)) throw std::domain_error("log_mpq: argument must be positive");
    long en = 0, ed = 0;
    const double mn = mpz_get_d_2exp(&en, q.get_num().get_mpz_t());
    const double md = mpz_get_d_2exp(&ed, q.get_den().get_mpz_t());
    return std::log(mn) - std::log(md) + std::log(2.0) * static_cast<double>(en - ed);
}

double acosh_one_plus_2u(const mpq_class& u) {
    if (u < 0) throw std::domain_error("acosh_one_plus_2u: u must be >= 0");
    if (u == 0) return 0.0;
    // arccosh(x) = log x + log(1 + sqrt(1 - 1/x^2)), x = 1 + 2u >= 1.
    const mpq_class x = 1 + 2 * u;
    const double lx = log_mpq(x);
    double inv = 0.0;
    if (lx < 300.0) {                 // 1/x^2 underflows to 0 beyond this anyway
        const double xd = std::exp(lx);
        inv = 1.0 / (xd * xd);
    }
    return lx + std::log1p(std::sqrt(1.0 - inv));
}

double hyp_distance(const UpperHalfPoint& z, const UpperHalfPoint& w) {
    const double u = point_pair_u(z, w);
    if (u <= 0.0) return 0.0;
    const double x = 1.0 + 2.0 * u;
    return std::log(x + std::sqrt(x * x - 1.0));
}

double hyp_distance_quotient_formula(const UpperHalfPoint& z, const UpperHalfPoint& w) {
    const double dx = z.x - w.x;
    const double dzw = std::hypot(dx, z.y - w.y);       // |z - w|
    const double dzwb = std::hypot(dx, z.y + w.y);      // |z - conj(w)|
    if (dzw == 0.0) return 0.0;
    return std::log((dzwb + dzw) / (dzwb - dzw));
}

double hyp_distance(const RationalPoint& z, const RationalPoint& w) {
    return acosh_one_plus_2u(point_pair_u(z, w));
}

UpperHalfPoint mobius_apply(const Mat2Z& g, const UpperHalfPoint& z) {
    const double a = g.a.get_d(), b = g.b.get_d(), c = g.c.get_d(), d = g.d.get_d();
    const double px = c * z.x + d;
    const double py = c * z.y;
    const double den = px * px + py * py;               // |cz + d|^2
    const double nx = a * z.x + b;
    const double ny = a * z.y;
    // (nz * conj(pz)) / |pz|^2
    return UpperHalfPoint((nx * px + ny * py) / den, (ny * px - nx * py) / den);
}

RationalPoint mobius_apply(const Mat2Z& g, const RationalPoint& z) {
    const mpq_class a(g.a), b(g.b), c(g.c), d(g.d);
    const mpq_class px = c * z.x + d;
    const mpq_class py = c * z.y;
    const mpq_class den = px * px + py * py;
    if (den == 0) throw std::domain_error("mobius_apply: degenerate denominator");
    const mpq_class nx = a * z.x + b;
    const mpq_class ny = a * z.y;
    return RationalPoint((nx * px + ny * py) / den, (ny * px - nx * py) / den);
}

double norm_distance_residual(const Mat2Z& g) {
    const RationalPoint i_pt;                           // (0, 1)
    const RationalPoint gi = mobius_apply(g, i_pt);
    const mpq_class u = point_pair_u(gi, i_pt);
    const mpq_class residual = mpq_class(matrix_norm_sq(g)) - (4 * u + 2);
    return std::fabs(residual.get_d());
}

double distance_i_to_gi(const Mat2Z& g) {
    // cosh d = ||g||^2 / 2 = 1 + 2u with u = (||g||^2 - 2) / 4.
    const mpq_class u = mpq_class(matrix_norm_sq(g) - 2) / 4;
    return acosh_one_plus_2u(u);
}

}  // namespace thinlab
