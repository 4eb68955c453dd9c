#include "thinlab/walsh.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace thinlab {

int mobius_square_free(std::uint32_t n) {
    int sign = 1;
    for (std::uint32_t p = 2; p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) throw std::invalid_argument("mobius_square_free: not square-free");
        sign = -sign;
    }
    return sign;
}

WalshDecomposition::WalshDecomposition(const GeneratorSystem& s, const SquareFreeModulus& q) {
    group_ = std::make_shared<ResidueGroup>(s, q);

    divisors_.push_back(1);
    for (std::uint32_t p : q.prime_factors) {
        const std::size_t m = divisors_.size();
        for (std::size_t i = 0; i < m; ++i) divisors_.push_back(divisors_[i] * p);
    }
    std::sort(divisors_.begin(), divisors_.end());

    for (std::uint32_t d : divisors_) {
        std::vector<std::uint32_t> fib(group_->size());
        std::unordered_map<std::uint64_t, std::uint32_t> ids;
        for (std::uint32_t i = 0; i < group_->size(); ++i) {
            const ModMat2& e = group_->element(i);
            const ModMat2 r{e.a % d, e.b % d, e.c % d, e.d % d};
            auto [it, inserted] =
                ids.emplace(r.key(), static_cast<std::uint32_t>(ids.size()));
            fib[i] = it->second;
        }
        fiber_of_.push_back(std::move(fib));
        fiber_count_.push_back(static_cast<std::uint32_t>(ids.size()));
    }
}

std::size_t WalshDecomposition::divisor_slot(std::uint32_t d) const {
    auto it = std::find(divisors_.begin(), divisors_.end(), d);
    if (it == divisors_.end())
        throw std::invalid_argument("WalshDecomposition: " + std::to_string(d) +
                                    " does not divide the modulus");
    return static_cast<std::size_t>(it - divisors_.begin());
}

Eigen::VectorXd WalshDecomposition::level_average(const Eigen::VectorXd& phi,
                                                  std::uint32_t d) const {
    const std::size_t slot = divisor_slot(d);
    const auto& fib = fiber_of_[slot];
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(fiber_count_[slot]);
    Eigen::VectorXd sizes = Eigen::VectorXd::Zero(fiber_count_[slot]);
    for (std::uint32_t i = 0; i < fib.size(); ++i) {
        sums[fib[i]] += phi[i];
        sizes[fib[i]] += 1.0;
    }
    Eigen::VectorXd out(phi.size());
    for (std::uint32_t i = 0; i < fib.size(); ++i) out[i] = sums[fib[i]] / sizes[fib[i]];
    return out;
}

Eigen::VectorXd WalshDecomposition::project(const Eigen::VectorXd& phi, std::uint32_t q1) const {
    divisor_slot(q1);  // validates q1 | q
    Eigen::VectorXd out = Eigen::VectorXd::Zero(phi.size());
    for (std::uint32_t d : divisors_) {
        if (q1 % d) continue;
        out += static_cast<double>(mobius_square_free(q1 / d)) * level_average(phi, d);
    }
    return out;
}

Eigen::VectorXd WalshDecomposition::top_component(const Eigen::VectorXd& phi) const {
    return project(phi, group_->modulus().q);
}

}  // namespace thinlab
