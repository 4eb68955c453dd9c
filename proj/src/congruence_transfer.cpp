#include "thinlab/congruence_transfer.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <stdexcept>

#include "thinlab/parallel.hpp"

namespace thinlab {

CongruenceTransferOperator::CongruenceTransferOperator(std::shared_ptr<const CylinderGrid> grid,
                                                       std::shared_ptr<const ResidueGroup> group,
                                                       double s, std::size_t dim_budget)
    : grid_(std::move(grid)), group_(std::move(group)), s_(s) {
    if (grid_->size() * group_->size() > dim_budget)
        throw std::invalid_argument("CongruenceTransferOperator: dimension exceeds budget");
    weights_ = (-s_ * grid_->tau_values().array()).exp();
    for (Letter l = 0; l < group_->generator_images().size(); ++l)
        actions_.push_back(group_->left_action(l));
}

Eigen::VectorXd CongruenceTransferOperator::apply(const Eigen::VectorXd& f) const {
    const std::size_t G = group_->size();
    const int deg = grid_->degree();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
    // rows are independent: chunk the cylinders across workers
    const int threads = dim() >= 65536 ? resolve_thread_count(0) : 1;
    parallel_chunks(grid_->size(), threads, [&](int, std::size_t lo, std::size_t hi) {
        for (std::size_t v = lo; v < hi; ++v) {
            double* row = out.data() + v * G;
            for (int t = 0; t < deg; ++t) {
                const std::uint32_t w = grid_->successor(v, t);
                const Letter j = grid_->successor_letter(v, t);
                const double wt = weights_[w];
                const double* src = f.data() + std::size_t(w) * G;
                const auto& act = actions_[j];
                for (std::size_t g = 0; g < G; ++g) row[g] += wt * src[act[g]];
            }
        }
    });
    return out;
}

Eigen::VectorXd CongruenceTransferOperator::lift_constant(const Eigen::VectorXd& phi) const {
    const std::size_t G = group_->size();
    Eigen::VectorXd f(static_cast<Eigen::Index>(grid_->size() * G));
    for (std::size_t v = 0; v < grid_->size(); ++v)
        for (std::size_t g = 0; g < G; ++g)
            f[static_cast<Eigen::Index>(v * G + g)] = phi[static_cast<Eigen::Index>(v)];
    return f;
}

Eigen::VectorXd CongruenceTransferOperator::reduce_constant(const Eigen::VectorXd& f) const {
    const std::size_t G = group_->size();
    Eigen::VectorXd phi(static_cast<Eigen::Index>(grid_->size()));
    for (std::size_t v = 0; v < grid_->size(); ++v) {
        double acc = 0.0;
        for (std::size_t g = 0; g < G; ++g) acc += f[static_cast<Eigen::Index>(v * G + g)];
        phi[static_cast<Eigen::Index>(v)] = acc / static_cast<double>(G);
    }
    return phi;
}

double arnoldi_spectral_radius(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                               Eigen::Index dim, int krylov, int restarts, std::uint64_t seed) {
    if (dim == 0) return 0.0;
    const int k = static_cast<int>(std::min<Eigen::Index>(krylov, dim));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double radius = 0.0;

    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXd v0(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v0[i] = unif(rng);
        v0 = apply(v0);     // push into the invariant subspace of interest
        const double n0 = v0.norm();
        if (n0 < 1e-290) continue;
        v0 /= n0;

        std::vector<Eigen::VectorXd> basis{v0};
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(k + 1, k);
        int m = k;
        for (int j = 0; j < k; ++j) {
            Eigen::VectorXd w = apply(basis[j]);
            for (int i = 0; i <= j; ++i) {            // modified Gram-Schmidt
                H(i, j) = basis[i].dot(w);
                w -= H(i, j) * basis[i];
            }
            for (int i = 0; i <= j; ++i) {            // re-orthogonalization pass
                const double c = basis[i].dot(w);
                H(i, j) += c;
                w -= c * basis[i];
            }
            H(j + 1, j) = w.norm();
            if (H(j + 1, j) < 1e-13) {                // invariant subspace found
                m = j + 1;
                break;
            }
            basis.push_back(w / H(j + 1, j));
        }
        const Eigen::MatrixXd Hm = H.topLeftCorner(m, m);
        Eigen::EigenSolver<Eigen::MatrixXd> es(Hm, false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            radius = std::max(radius, std::abs(es.eigenvalues()[i]));
    }
    return radius;
}

SectorGapReport congruence_sector_gap(const SubshiftSpec& spec, int depth, std::uint64_t q,
                                      double s, int tail_pad, int threads) {
    SectorGapReport rep;
    const SquareFreeModulus mod = SquareFreeModulus::make(q);
    rep.q = mod.q;

    auto grid = std::make_shared<const CylinderGrid>(spec, depth, tail_pad, threads);
    rep.lambda = leading_eigenvalue(TransferOperator(grid, s));

    if (mod.q == 1) {        // no nontrivial sector; degenerate value by convention
        rep.dim = grid->size();
        rep.sector_radius = rep.lambda;
        rep.ratio = 1.0;
        return rep;
    }

    auto group = std::make_shared<const ResidueGroup>(spec.system, mod);
    if (!group->is_full())
        throw std::invalid_argument("congruence_sector_gap: closure mod " +
                                    std::to_string(mod.q) + " is not full");
    const CongruenceTransferOperator op(grid, group, s);
    rep.dim = op.dim();

    const WalshDecomposition walsh(spec.system, mod);
    const std::size_t G = group->size();
    auto project_sector = [&](const Eigen::VectorXd& f) {
        Eigen::VectorXd out(f.size());
        Eigen::VectorXd slice(static_cast<Eigen::Index>(G));
        for (std::size_t v = 0; v < grid->size(); ++v) {
            for (std::size_t g = 0; g < G; ++g)
                slice[static_cast<Eigen::Index>(g)] = f[static_cast<Eigen::Index>(v * G + g)];
            const Eigen::VectorXd proj = walsh.top_component(slice);
            for (std::size_t g = 0; g < G; ++g)
                out[static_cast<Eigen::Index>(v * G + g)] = proj[static_cast<Eigen::Index>(g)];
        }
        return out;
    };

    auto sector_apply = [&](const Eigen::VectorXd& f) { return project_sector(op.apply(f)); };
    rep.sector_radius = arnoldi_spectral_radius(
        sector_apply, static_cast<Eigen::Index>(op.dim()));
    rep.ratio = rep.sector_radius / rep.lambda;
    return rep;
}

}  // namespace thinlab
