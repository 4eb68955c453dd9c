#pragma once

// Cayley-graph averaging operator on SL2(Z/qZ), its spectral gap, the
// Frobenius multiplicity bound at primes, and L2-flattening of convolution
// powers of the generator measure.

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "thinlab/residue.hpp"

namespace thinlab {

class AveragingOperator {
public:
    // Requires the closure mod q to be full; throws naming the first prime
    // factor whose closure is proper.
    AveragingOperator(const GeneratorSystem& s, const SquareFreeModulus& q);

    // Averaging over an arbitrary symmetric multiset of element indices on a
    // given group table; no closure precondition (disconnected graphs allowed).
    AveragingOperator(std::shared_ptr<const ResidueGroup> group,
                      std::vector<std::uint32_t> generator_images);

    std::size_t dim() const { return group_->size(); }
    const ResidueGroup& group() const { return *group_; }
    const std::vector<std::uint32_t>& generator_images() const { return gen_images_; }

    // T f(x) = (1/|S|) sum_s f(s.x)
    Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
    Eigen::MatrixXd dense() const;

private:
    std::shared_ptr<const ResidueGroup> group_;
    std::vector<std::uint32_t> gen_images_;
    std::vector<std::vector<std::uint32_t>> actions_;   // one left-translation row per letter
};

struct SpectrumReport {
    std::uint32_t q = 1;
    std::size_t dim = 0;
    double lambda_1 = 0.0;               // largest |eigenvalue| on the complement of constants
    double gap = 0.0;                    // 1 - lambda_1
    std::map<double, int> multiplicities;   // clustered eigenvalue -> dimension (dense path)
    int iterations = 0;                  // 0 for the dense path
    double residual = 0.0;
};

// Dense symmetric eigensolve for dim <= dense_limit, deflated power iteration
// beyond; the residual ||Tv - lambda v||_inf <= tol is certified either way.
SpectrumReport spectral_gap(const AveragingOperator& op, double tol = 1e-10,
                            std::size_t dense_limit = 5000);

struct MultiplicityReport {
    bool ok = false;
    int required = 0;                    // (p - 1) / 2
    std::vector<std::pair<double, int>> clusters;  // eigenvalue, multiplicity on L2_0
};

// Checks the Frobenius lower bound on eigenvalue multiplicities at a prime
// modulus; dense eigensolve, so p <= 13 is enforced.
MultiplicityReport multiplicity_check(const AveragingOperator& op, double cluster_tol = 1e-8);

// ||mu^(l)||_2 for l = 1..l_max, mu the uniform measure on the generator
// images (a multiset: coinciding images keep their multiplicity).
std::vector<double> flattening_profile(const GeneratorSystem& s, const SquareFreeModulus& q,
                                       int l_max);

}  // namespace thinlab
