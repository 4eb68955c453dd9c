#include "thinlab/cayley.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace thinlab {

AveragingOperator::AveragingOperator(const GeneratorSystem& s, const SquareFreeModulus& q) {
    for (std::uint32_t p : q.prime_factors) {
        const ResidueGroup gp(s, SquareFreeModulus::make(p));
        if (!gp.is_full())
            throw std::invalid_argument("AveragingOperator: closure mod " + std::to_string(p) +
                                        " is a proper subgroup (size " +
                                        std::to_string(gp.size()) + ")");
    }
    group_ = std::make_shared<ResidueGroup>(s, q);
    gen_images_ = group_->generator_images();
    for (Letter l = 0; l < s.alphabet_size(); ++l) actions_.push_back(group_->left_action(l));
}

AveragingOperator::AveragingOperator(std::shared_ptr<const ResidueGroup> group,
                                     std::vector<std::uint32_t> generator_images)
    : group_(std::move(group)), gen_images_(std::move(generator_images)) {
    if (gen_images_.empty())
        throw std::invalid_argument("AveragingOperator: empty generator list");
    for (std::uint32_t gi : gen_images_) actions_.push_back(group_->left_action_of(gi));
}

Eigen::VectorXd AveragingOperator::apply(const Eigen::VectorXd& f) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
    for (const auto& act : actions_)
        for (Eigen::Index x = 0; x < f.size(); ++x) out[x] += f[act[x]];
    return out / static_cast<double>(actions_.size());
}

Eigen::MatrixXd AveragingOperator::dense() const {
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    const double w = 1.0 / static_cast<double>(actions_.size());
    for (const auto& act : actions_)
        for (Eigen::Index x = 0; x < n; ++x) m(x, act[x]) += w;
    return m;
}

namespace {

std::map<double, int> cluster_eigenvalues(const Eigen::VectorXd& ev, double tol) {
    std::map<double, int> clusters;
    std::vector<double> sorted(ev.data(), ev.data() + ev.size());
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] - sorted[j] <= tol) ++j;
        double mean = 0.0;
        for (std::size_t k = i; k <= j; ++k) mean += sorted[k];
        mean /= static_cast<double>(j - i + 1);
        clusters[mean] = static_cast<int>(j - i + 1);
        i = j + 1;
    }
    return clusters;
}

}  // namespace

SpectrumReport spectral_gap(const AveragingOperator& op, double tol, std::size_t dense_limit) {
    SpectrumReport rep;
    rep.q = op.group().modulus().q;
    rep.dim = op.dim();
    const auto n = static_cast<Eigen::Index>(op.dim());

    if (op.dim() <= dense_limit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.dense());
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("spectral_gap: dense eigensolve failed");
        Eigen::VectorXd ev = solver.eigenvalues();
        // drop one copy of the trivial eigenvalue 1 (the constants)
        Eigen::Index top;
        ev.maxCoeff(&top);
        std::vector<double> rest;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (i != top) rest.push_back(ev[i]);
        double l1 = 0.0;
        for (double v : rest) l1 = std::max(l1, std::fabs(v));
        rep.lambda_1 = l1;
        rep.gap = 1.0 - l1;
        rep.multiplicities = cluster_eigenvalues(ev, 1e-8);
        rep.residual = tol;
        return rep;
    }

    // deflated power iteration on the complement of constants, for |T| so the
    // dominant magnitude is found regardless of sign: iterate T^2
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = unif(rng);
    auto deflate = [&](Eigen::VectorXd& x) { x.array() -= x.mean(); };
    deflate(v);
    v.normalize();
    double lambda_sq = 0.0;
    int it = 0;
    const int max_iter = 200000;
    double residual = 1.0;
    while (it < max_iter) {
        Eigen::VectorXd w = op.apply(op.apply(v));
        deflate(w);
        lambda_sq = v.dot(w);
        residual = (w - lambda_sq * v).norm();
        const double nw = w.norm();
        if (nw == 0.0) break;
        v = w / nw;
        ++it;
        if (residual <= tol * std::max(1.0, std::fabs(lambda_sq))) break;
    }
    if (residual > tol * std::max(1.0, std::fabs(lambda_sq)))
        throw std::runtime_error("spectral_gap: power iteration did not converge, best lambda1=" +
                                 std::to_string(std::sqrt(std::max(0.0, lambda_sq))));
    rep.lambda_1 = std::sqrt(std::max(0.0, lambda_sq));
    rep.gap = 1.0 - rep.lambda_1;
    rep.iterations = it;
    rep.residual = residual;
    return rep;
}

MultiplicityReport multiplicity_check(const AveragingOperator& op, double cluster_tol) {
    const auto& q = op.group().modulus();
    if (q.prime_factors.size() != 1 || q.prime_factors[0] != q.q)
        throw std::invalid_argument("multiplicity_check: modulus must be prime");
    if (q.q > 13)
        throw std::invalid_argument("multiplicity_check: dimension too large (p > 13)");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.dense());
    Eigen::VectorXd ev = solver.eigenvalues();
    Eigen::Index top;
    ev.maxCoeff(&top);
    std::vector<double> rest;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (i != top) rest.push_back(ev[i]);

    MultiplicityReport rep;
    rep.required = static_cast<int>((q.q - 1) / 2);
    std::sort(rest.begin(), rest.end());
    std::size_t i = 0;
    rep.ok = true;
    while (i < rest.size()) {
        std::size_t j = i;
        while (j + 1 < rest.size() && rest[j + 1] - rest[j] <= cluster_tol) ++j;
        double mean = 0.0;
        for (std::size_t k = i; k <= j; ++k) mean += rest[k];
        const int mult = static_cast<int>(j - i + 1);
        rep.clusters.emplace_back(mean / mult, mult);
        if (mult < rep.required) rep.ok = false;
        i = j + 1;
    }
    return rep;
}

std::vector<double> flattening_profile(const GeneratorSystem& s, const SquareFreeModulus& q,
                                       int l_max) {
    if (l_max < 1) throw std::invalid_argument("flattening_profile: l_max must be >= 1");
    const ResidueGroup group(s, q);
    const auto n = static_cast<Eigen::Index>(group.size());
    const auto& images = group.generator_images();
    const auto inv = group.inverse_table();

    // mu as a measure vector summing to 1; multiplicity kept if images coincide
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    const double w = 1.0 / static_cast<double>(images.size());
    for (std::uint32_t gi : images) mu[gi] += w;

    std::vector<std::vector<std::uint32_t>> sinv_actions;
    for (std::uint32_t gi : images) sinv_actions.push_back(group.left_action_of(inv[gi]));

    std::vector<double> profile;
    Eigen::VectorXd cur = mu;
    profile.push_back(cur.norm());
    for (int l = 2; l <= l_max; ++l) {
        // (mu * nu)(x) = (1/|S|) sum_s nu(s^{-1} x)
        Eigen::VectorXd next = Eigen::VectorXd::Zero(n);
        for (const auto& act : sinv_actions)
            for (Eigen::Index x = 0; x < n; ++x) next[x] += cur[act[x]];
        cur = next * w;
        profile.push_back(cur.norm());
    }
    return profile;
}

}  // namespace thinlab
