#include "thinlab/transfer.hpp"

#include <cmath>
#include <stdexcept>

namespace thinlab {

TransferOperator::TransferOperator(std::shared_ptr<const CylinderGrid> grid, double s)
    : grid_(std::move(grid)), s_(s) {
    weights_ = (-s_ * grid_->tau_values().array()).exp();
}

Eigen::VectorXd TransferOperator::apply(const Eigen::VectorXd& f) const {
    const int deg = grid_->degree();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
    for (std::size_t v = 0; v < grid_->size(); ++v) {
        double acc = 0.0;
        for (int t = 0; t < deg; ++t) {
            const std::uint32_t w = grid_->successor(v, t);
            acc += weights_[w] * f[w];
        }
        out[static_cast<Eigen::Index>(v)] = acc;
    }
    return out;
}

Eigen::VectorXd TransferOperator::apply_transpose(const Eigen::VectorXd& f) const {
    const int deg = grid_->degree();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
    for (std::size_t w = 0; w < grid_->size(); ++w) {
        double acc = 0.0;
        for (int t = 0; t < deg; ++t) acc += f[grid_->predecessor(w, t)];
        out[static_cast<Eigen::Index>(w)] = weights_[w] * acc;
    }
    return out;
}

Eigen::SparseMatrix<double> TransferOperator::matrix() const {
    const auto n = static_cast<Eigen::Index>(grid_->size());
    const int deg = grid_->degree();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(grid_->size() * deg);
    for (Eigen::Index v = 0; v < n; ++v)
        for (int t = 0; t < deg; ++t) {
            const std::uint32_t w = grid_->successor(v, t);
            trips.emplace_back(v, w, weights_[w]);
        }
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

namespace {

struct PowerResult {
    double lambda;
    Eigen::VectorXd vec;
    int iterations;
    double residual;
};

template <typename Apply>
PowerResult perron_power(const Apply& apply, Eigen::Index n, double tol, int max_iter) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    double lambda = 0.0, residual = 1.0;
    int it = 0;
    while (it < max_iter) {
        Eigen::VectorXd w = apply(v);
        lambda = w.sum() / v.sum();
        residual = (w - lambda * v).lpNorm<Eigen::Infinity>();
        const double ws = w.sum();
        if (!(ws > 0.0)) throw std::runtime_error("perron_power: vector collapsed");
        v = w / ws;
        ++it;
        if (residual <= tol * std::max(lambda, 1e-300)) break;
    }
    if (residual > tol * std::max(lambda, 1e-300))
        throw std::runtime_error("perron_power: no convergence after " +
                                 std::to_string(max_iter) + " iterations, lambda=" +
                                 std::to_string(lambda));
    return PowerResult{lambda, std::move(v), it, residual};
}

}  // namespace

PerronTriple leading_eigentriple(const TransferOperator& op, double tol, int max_iter) {
    const auto n = static_cast<Eigen::Index>(op.dim());
    PowerResult right = perron_power([&](const Eigen::VectorXd& x) { return op.apply(x); },
                                     n, tol, max_iter);
    PowerResult left = perron_power([&](const Eigen::VectorXd& x) { return op.apply_transpose(x); },
                                    n, tol, max_iter);
    PerronTriple out;
    out.lambda = right.lambda;
    out.h = std::move(right.vec);
    out.nu = std::move(left.vec);
    out.nu /= out.nu.sum();
    const double hn = out.nu.dot(out.h);
    if (!(hn > 0.0)) throw std::runtime_error("leading_eigentriple: degenerate normalization");
    out.h /= hn;                       // now integral of h against nu is 1
    out.iterations = right.iterations + left.iterations;
    out.residual = std::max(right.residual, left.residual);
    return out;
}

double leading_eigenvalue(const TransferOperator& op, double tol) {
    const auto n = static_cast<Eigen::Index>(op.dim());
    return perron_power([&](const Eigen::VectorXd& x) { return op.apply(x); }, n, tol, 100000)
        .lambda;
}

PressureCurve pressure_curve(const SubshiftSpec& spec, int depth,
                             const std::vector<double>& s_values, int tail_pad) {
    auto grid = std::make_shared<const CylinderGrid>(spec, depth, tail_pad);
    PressureCurve curve;
    for (double s : s_values)
        curve.samples.emplace_back(s, std::log(leading_eigenvalue(TransferOperator(grid, s))));

    double lo = 0.0, hi = 1.0;
    auto press = [&](double s) { return std::log(leading_eigenvalue(TransferOperator(grid, s))); };
    if (press(lo) <= 0.0)
        throw std::runtime_error("pressure_curve: pressure at s=0 is not positive");
    while (press(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 64.0) throw std::runtime_error("pressure_curve: no sign change up to s=64");
    }
    curve.bracket_lo = lo;
    curve.bracket_hi = hi;
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (press(mid) > 0.0 ? lo : hi) = mid;
    }
    curve.root = 0.5 * (lo + hi);
    return curve;
}

DeltaEstimate estimate_delta(const SubshiftSpec& spec, const std::vector<int>& depths,
                             double tol, int tail_pad, int threads) {
    if (depths.empty()) throw std::invalid_argument("estimate_delta: empty depth schedule");
    DeltaEstimate est;
    for (int depth : depths) {
        auto grid = std::make_shared<const CylinderGrid>(spec, depth, tail_pad, threads);
        auto lambda_at = [&](double s) {
            return leading_eigenvalue(TransferOperator(grid, s));
        };
        double lo = 0.0;
        if (lambda_at(lo) <= 1.0)
            throw std::runtime_error("estimate_delta: lambda at s=0 is <= 1 (degenerate system)");
        double hi = 1.0;
        while (lambda_at(hi) > 1.0) {
            hi *= 2.0;
            if (hi > 64.0)
                throw std::runtime_error("estimate_delta: failed to bracket the pressure root");
        }
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            (lambda_at(mid) > 1.0 ? lo : hi) = mid;
        }
        DeltaDepthRow row;
        row.depth = depth;
        row.cylinders = grid->size();
        row.delta_hat = 0.5 * (lo + hi);
        row.drift = est.rows.empty() ? 0.0 : std::fabs(row.delta_hat - est.rows.back().delta_hat);
        est.rows.push_back(row);
    }
    return est;
}

GibbsRatioReport gibbs_ratio_check(const CylinderGrid& grid, double delta_hat, double s_eval) {
    auto grid_ptr = std::shared_ptr<const CylinderGrid>(&grid, [](const CylinderGrid*) {});
    const PerronTriple triple = leading_eigentriple(TransferOperator(grid_ptr, delta_hat));
    const double lambda_eval = leading_eigenvalue(TransferOperator(grid_ptr, s_eval));

    // cylinder mass of the Gibbs measure: m(v) = h(v) nu(v)
    Eigen::VectorXd mass = triple.h.cwiseProduct(triple.nu);
    mass /= mass.sum();

    const int n = grid.depth();
    GibbsRatioReport rep;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    rep.max_ratio = 0.0;
    for (std::size_t v = 0; v < grid.size(); ++v) {
        const double predicted =
            std::pow(lambda_eval, -n) * std::exp(-s_eval * grid.birkhoff_sum(v));
        const double ratio = mass[static_cast<Eigen::Index>(v)] / predicted;
        rep.min_ratio = std::min(rep.min_ratio, ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
    return rep;
}

}  // namespace thinlab
