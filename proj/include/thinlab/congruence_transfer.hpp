#pragma once

// Congruence transfer operator M_z on functions over cylinders x SL2(q):
//
//   (M_{-s} f)(x, g) = sum over admissible letters j of
//                      e^{-s tau(j x)} f(j x; g_j g),
//
// realized on a finite cylinder grid with the same truncation as the scalar
// operator; restricting to functions constant in g reproduces the scalar
// transfer matrix entry for entry. The E_q sector (Walsh top component in
// the group variable) is invariant, and its spectral radius against
// lambda_{-s} is the measured shadow of the congruence gap.

#include <Eigen/Dense>

#include <functional>
#include <memory>

#include "thinlab/residue.hpp"
#include "thinlab/shift.hpp"
#include "thinlab/transfer.hpp"
#include "thinlab/walsh.hpp"

namespace thinlab {

class CongruenceTransferOperator {
public:
    CongruenceTransferOperator(std::shared_ptr<const CylinderGrid> grid,
                               std::shared_ptr<const ResidueGroup> group, double s,
                               std::size_t dim_budget = 50'000'000);

    std::size_t dim() const { return grid_->size() * group_->size(); }
    const CylinderGrid& grid() const { return *grid_; }
    const ResidueGroup& group() const { return *group_; }
    double s() const { return s_; }

    // f is indexed f[v * |G| + g]
    Eigen::VectorXd apply(const Eigen::VectorXd& f) const;

    // Lift of a scalar cylinder function to a g-constant function.
    Eigen::VectorXd lift_constant(const Eigen::VectorXd& phi) const;
    // Group-average per cylinder (the inverse of lift on constants).
    Eigen::VectorXd reduce_constant(const Eigen::VectorXd& f) const;

private:
    std::shared_ptr<const CylinderGrid> grid_;
    std::shared_ptr<const ResidueGroup> group_;
    double s_;
    Eigen::VectorXd weights_;                            // e^{-s tau(w)}
    std::vector<std::vector<std::uint32_t>> actions_;    // left translation per letter
};

// Largest |eigenvalue| of a linear map by Arnoldi iteration (a few random
// restarts, dense eigensolve of the small Hessenberg block).
double arnoldi_spectral_radius(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                               Eigen::Index dim, int krylov = 60, int restarts = 2,
                               std::uint64_t seed = 0x715eedULL);

struct SectorGapReport {
    std::uint32_t q = 1;
    std::size_t dim = 0;
    double lambda = 0.0;          // scalar Perron eigenvalue at s
    double sector_radius = 0.0;   // spectral radius of M_{-s} on the E_q sector
    double ratio = 1.0;           // sector_radius / lambda; 1 is the degenerate q=1 value
};

// Measured congruence-sector contraction at modulus q and parameter s.
// Requires full closure mod q.
SectorGapReport congruence_sector_gap(const SubshiftSpec& spec, int depth, std::uint64_t q,
                                      double s, int tail_pad = CylinderGrid::kDefaultTailPad,
                                      int threads = 0);

}  // namespace thinlab
