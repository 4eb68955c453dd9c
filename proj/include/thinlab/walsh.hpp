#pragma once

// Fourier-Walsh decomposition of L2(SL2(Z/qZ)) for square-free q:
//
//   L2(SL2(q)) = R (+) sum over q1 | q of E_{q1},
//
// where E_{q1} holds the functions defined mod q1 and orthogonal to every
// function defined mod a proper divisor of q1. Components are realized
// constructively: Pi_d is the lift of the fiber average mod d, and
// P_{q1} = sum_{d | q1} mobius(q1/d) Pi_d. Norms here are taken in the
// normalized inner product <f, g> = (1/|G|) sum f g.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "thinlab/residue.hpp"

namespace thinlab {

class WalshDecomposition {
public:
    WalshDecomposition(const GeneratorSystem& s, const SquareFreeModulus& q);

    const ResidueGroup& group() const { return *group_; }
    const std::vector<std::uint32_t>& divisors() const { return divisors_; }

    // Lifted fiber-average projection Pi_d. d must divide q.
    Eigen::VectorXd level_average(const Eigen::VectorXd& phi, std::uint32_t d) const;

    // Walsh component P_{q1} phi; q1 = 1 gives the constant component.
    Eigen::VectorXd project(const Eigen::VectorXd& phi, std::uint32_t q1) const;

    // Component in E_q itself (the top level): phi minus all lower levels.
    Eigen::VectorXd top_component(const Eigen::VectorXd& phi) const;

    double normalized_norm(const Eigen::VectorXd& phi) const {
        return phi.norm() / std::sqrt(static_cast<double>(group_->size()));
    }

private:
    std::shared_ptr<const ResidueGroup> group_;
    std::vector<std::uint32_t> divisors_;               // all divisors of q, ascending
    std::vector<std::vector<std::uint32_t>> fiber_of_;  // per divisor slot, per element
    std::vector<std::uint32_t> fiber_count_;

    std::size_t divisor_slot(std::uint32_t d) const;
};

// mobius function of a square-free integer given by its prime count
int mobius_square_free(std::uint32_t n);

}  // namespace thinlab
