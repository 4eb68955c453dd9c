#include "thinlab/counting.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <stdexcept>

namespace thinlab {

std::vector<double> geometric_ladder(double t_min, double t_max, double ratio) {
    if (!(t_min > 0) || !(t_max >= t_min) || !(ratio > 1.0))
        throw std::invalid_argument("geometric_ladder: need 0 < t_min <= t_max, ratio > 1");
    std::vector<double> ladder;
    for (double t = t_min; t < t_max; t *= ratio) ladder.push_back(t);
    ladder.push_back(t_max);
    return ladder;
}

BallCountSeries orbit_count(const BallEnumeration& ball, const std::vector<double>& ladder) {
    for (std::size_t i = 0; i + 1 < ladder.size(); ++i)
        if (!(ladder[i] < ladder[i + 1]))
            throw std::invalid_argument("orbit_count: ladder must be strictly increasing");

    BallCountSeries series;
    series.truncated = ball.truncated;
    for (double T : ladder) {
        const double t_sq = T * T;
        // in_ball is sorted by exact norm_sq; compare exactly against T^2
        // (doubles cannot represent large norms faithfully)
        const auto it = std::upper_bound(
            ball.in_ball.begin(), ball.in_ball.end(), t_sq,
            [&](double bound, std::uint32_t idx) {
                return mpz_cmp_d(ball.entries[idx].norm_sq.get_mpz_t(), bound) > 0;
            });
        series.thresholds.push_back(T);
        series.counts.push_back(static_cast<std::uint64_t>(it - ball.in_ball.begin()));
        series.distances.push_back(std::acosh(std::max(1.0, t_sq / 2.0)));
    }
    return series;
}

BallCountSeries orbit_count(const GeneratorSystem& s, const std::vector<double>& ladder,
                            const BallOptions& opt) {
    if (ladder.empty()) throw std::invalid_argument("orbit_count: empty ladder");
    const BallEnumeration ball = enumerate_ball(s, ladder.back(), opt);
    return orbit_count(ball, ladder);
}

ExponentFit exponent_fit(const BallCountSeries& series, double burn_in_quantile) {
    const std::size_t n = series.thresholds.size();
    const std::size_t start = static_cast<std::size_t>(burn_in_quantile * static_cast<double>(n));
    std::vector<double> xs, ys;
    for (std::size_t i = start; i < n; ++i) {
        if (series.counts[i] == 0) continue;
        xs.push_back(std::log(series.thresholds[i]));
        ys.push_back(std::log(static_cast<double>(series.counts[i])));
    }
    if (xs.size() < 5)
        throw std::invalid_argument("exponent_fit: fewer than 5 usable ladder points");

    const double n_d = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    ExponentFit fit;
    const double denom = n_d * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("exponent_fit: degenerate ladder");
    fit.slope = (n_d * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n_d;
    fit.points_used = xs.size();
    for (std::size_t i = 0; i < xs.size(); ++i)
        fit.max_residual =
            std::max(fit.max_residual, std::fabs(ys[i] - fit.slope * xs[i] - fit.intercept));
    return fit;
}

CongruenceCountTable congruence_count(const GeneratorSystem& s, const BallEnumeration& ball,
                                      const SquareFreeModulus& q) {
    const ResidueGroup group(s, q);
    CongruenceCountTable table;
    table.q = q.q;
    table.class_counts.assign(group.size(), 0);
    for (std::uint32_t idx : ball.in_ball) {
        const ModMat2 r = reduce_mod(ball.entries[idx].element, q);
        ++table.class_counts[group.index_of(r)];
        ++table.total;
    }
    const double m = static_cast<double>(group.size());
    double l2 = 0.0;
    for (std::uint64_t c : table.class_counts) {
        if (c > 0) ++table.classes_hit;
        const double rel =
            table.total ? static_cast<double>(c) * m / static_cast<double>(table.total) - 1.0 : 0.0;
        table.max_relative_deviation = std::max(table.max_relative_deviation, std::fabs(rel));
        l2 += rel * rel;
    }
    table.l2_deviation = std::sqrt(l2 / m);
    return table;
}

// --- renewal ----------------------------------------------------------------

namespace {

constexpr double kDyadic = 1099511627776.0;   // 2^40

double quantize(double v) { return std::round(v * kDyadic) / kDyadic; }

// d(o, mat(word) w) quantized to the dyadic grid
double word_distance_q(const SubshiftSpec& spec, const Word& word) {
    RationalPoint z = spec.basepoint;
    for (Letter l : word) z = mobius_apply(spec.system.generator(l), z);
    const RationalPoint origin;
    return quantize(hyp_distance(origin, z));
}

// counts appended extensions y = x.u (u possibly empty) with D(y) <= theta
std::int64_t count_extensions(const SubshiftSpec& spec, const Word& x, double theta,
                              int max_extra, double margin) {
    std::int64_t count = 0;
    Word cur = x;
    auto rec = [&](auto&& self, double dist_q, int extra) -> void {
        if (dist_q <= theta) ++count;
        if (extra >= max_extra) {
            if (dist_q <= theta + margin)
                throw std::runtime_error(
                    "renewal_identity_check: horizon too small for requested a");
            return;
        }
        if (dist_q > theta + margin) return;    // no admissible return possible at desk scale
        for (Letter j = 0; j < spec.system.alphabet_size(); ++j) {
            if (!cur.empty() && !spec.system.transition(cur.back(), j)) continue;
            cur.push_back(j);
            self(self, word_distance_q(spec, cur), extra + 1);
            cur.pop_back();
        }
    };
    rec(rec, word_distance_q(spec, x), 0);
    return count;
}

}  // namespace

RenewalCheck renewal_identity_check(const SubshiftSpec& spec, double a, const Word& x,
                                    int max_extra_length) {
    if (!spec.system.is_admissible(x))
        throw std::invalid_argument("renewal_identity_check: inadmissible base word");
    const double margin = 10.0;
    const double a_q = quantize(a);
    const double dx = word_distance_q(spec, x);
    const double theta = a_q + dx;

    RenewalCheck check;
    check.lhs = count_extensions(spec, x, theta, max_extra_length, margin);

    check.rhs = (a_q >= 0.0) ? 1 : 0;
    for (Letter j = 0; j < spec.system.alphabet_size(); ++j) {
        if (!x.empty() && !spec.system.transition(x.back(), j)) continue;
        Word xj = x;
        xj.push_back(j);
        const double dxj = word_distance_q(spec, xj);
        const double tau_q = dxj - dx;              // exact dyadic difference
        const double a_inner = a_q - tau_q;         // exact
        check.rhs += count_extensions(spec, xj, a_inner + dxj, max_extra_length - 1, margin);
    }
    return check;
}

// --- smoothing ---------------------------------------------------------------

namespace {

double bump_raw(double t) {
    const double w = 1.0 - 4.0 * t * t;
    if (w <= 0.0) return 0.0;
    return std::exp(-1.0 / w);
}

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double f_lo, double f_mid, double f_hi, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), mh = 0.5 * (mid + hi);
    const double f_lm = f(lm), f_mh = f(mh);
    const double whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
    const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
    const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_mh + f_hi);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, lo, mid, f_lo, f_lm, f_mid, tol / 2.0, depth - 1) +
           adaptive_simpson(f, mid, hi, f_mid, f_mh, f_hi, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(hi > lo)) return 0.0;
    const double mid = 0.5 * (lo + hi);
    return adaptive_simpson(f, lo, hi, f(lo), f(mid), f(hi), tol, 40);
}

double bump_normalization() {
    static const double norm = integrate(bump_raw, -0.5, 0.5, 1e-14);
    return norm;
}

}  // namespace

BumpKernel::BumpKernel(double gamma) : gamma_(gamma) {
    if (!(gamma > 0)) throw std::invalid_argument("BumpKernel: gamma must be positive");
}

double BumpKernel::density(double t) const {
    return bump_raw(t / gamma_) / (bump_normalization() * gamma_);
}

double BumpKernel::mass() const {
    return integrate([&](double t) { return density(t); }, -gamma_ / 2.0, gamma_ / 2.0, 1e-12);
}

double BumpKernel::cdf(double t) const {
    const double u = t / gamma_;
    if (u <= -0.5) return 0.0;
    if (u >= 0.5) return 1.0;
    return integrate(bump_raw, -0.5, u, 1e-13) / bump_normalization();
}

std::vector<double> orbit_distance_values(const GeneratorSystem& s, const BallEnumeration& ball,
                                          const SquareFreeModulus& q, std::int64_t class_index) {
    const ResidueGroup group(s, q);
    std::vector<double> values;
    for (std::uint32_t idx : ball.in_ball) {
        if (class_index >= 0) {
            const ModMat2 r = reduce_mod(ball.entries[idx].element, q);
            if (group.index_of(r) != static_cast<std::uint32_t>(class_index)) continue;
        }
        values.push_back(distance_i_to_gi(ball.entries[idx].element));
    }
    std::sort(values.begin(), values.end());
    return values;
}

double smoothed_count(const GeneratorSystem& s, const BallEnumeration& ball,
                      const BumpKernel& kernel, double a,
                      const SquareFreeModulus& q, std::int64_t class_index) {
    const std::vector<double> values = orbit_distance_values(s, ball, q, class_index);
    const double half = kernel.gamma() / 2.0;

    // jump points of t -> N(a + t) inside the kernel window, in t coordinates
    std::vector<double> cuts{-half};
    for (double v : values)
        if (v - a > -half && v - a < half) cuts.push_back(v - a);
    cuts.push_back(half);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        const auto it = std::upper_bound(values.begin(), values.end(), a + mid);
        const double level = static_cast<double>(it - values.begin());
        total += level * (kernel.cdf(cuts[i + 1]) - kernel.cdf(cuts[i]));
    }
    return total;
}

}  // namespace thinlab
