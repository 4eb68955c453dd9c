#include "thinlab/residue.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace thinlab {

std::vector<std::uint32_t> primes_up_to(std::uint32_t bound) {
    std::vector<std::uint32_t> primes;
    if (bound < 2) return primes;
    std::vector<bool> composite(bound + 1, false);
    for (std::uint32_t p = 2; p <= bound; ++p) {
        if (composite[p]) continue;
        primes.push_back(p);
        for (std::uint64_t m = std::uint64_t(p) * p; m <= bound; m += p) composite[m] = true;
    }
    return primes;
}

SquareFreeModulus SquareFreeModulus::make(std::uint64_t q) {
    if (q == 0) throw std::invalid_argument("modulus must be positive");
    if (q > 65535) throw std::invalid_argument("modulus too large (max 65535)");
    SquareFreeModulus out;
    out.q = static_cast<std::uint32_t>(q);
    std::uint64_t rest = q;
    for (std::uint64_t p = 2; p * p <= rest; ++p) {
        if (rest % p) continue;
        rest /= p;
        if (rest % p == 0)
            throw std::invalid_argument("modulus " + std::to_string(q) + " is not square-free");
        out.prime_factors.push_back(static_cast<std::uint32_t>(p));
    }
    if (rest > 1) out.prime_factors.push_back(static_cast<std::uint32_t>(rest));
    return out;
}

ModMat2 reduce_mod(const Mat2Z& g, const SquareFreeModulus& q) {
    auto red = [&](const mpz_class& z) {
        return static_cast<std::uint32_t>(mpz_fdiv_ui(z.get_mpz_t(), q.q));
    };
    return ModMat2{red(g.a), red(g.b), red(g.c), red(g.d)};
}

ModMat2 mod_mul(const ModMat2& x, const ModMat2& y, std::uint32_t q) {
    auto m = [&](std::uint64_t u, std::uint64_t v) { return (u * v) % q; };
    return ModMat2{static_cast<std::uint32_t>((m(x.a, y.a) + m(x.b, y.c)) % q),
                   static_cast<std::uint32_t>((m(x.a, y.b) + m(x.b, y.d)) % q),
                   static_cast<std::uint32_t>((m(x.c, y.a) + m(x.d, y.c)) % q),
                   static_cast<std::uint32_t>((m(x.c, y.b) + m(x.d, y.d)) % q)};
}

ModMat2 mod_inverse(const ModMat2& x, std::uint32_t q) {
    auto neg = [&](std::uint32_t v) { return v ? q - v : 0u; };
    return ModMat2{x.d, neg(x.b), neg(x.c), x.a};
}

namespace {

std::uint64_t sl2_order_prime(std::uint32_t p) {
    if (p <= 50) {
        // plain quadruple loop over all 2x2 matrices mod p
        std::uint64_t count = 0;
        for (std::uint64_t a = 0; a < p; ++a)
            for (std::uint64_t b = 0; b < p; ++b)
                for (std::uint64_t c = 0; c < p; ++c)
                    for (std::uint64_t d = 0; d < p; ++d)
                        if ((a * d % p + p - b * c % p) % p == 1) ++count;
        return count;
    }
    // count solutions of ad = 1 + bc by rows (a, b, c)
    std::uint64_t count = 0;
    for (std::uint64_t a = 0; a < p; ++a)
        for (std::uint64_t b = 0; b < p; ++b)
            for (std::uint64_t c = 0; c < p; ++c) {
                const std::uint64_t rhs = (1 + b * c) % p;
                if (a != 0)
                    ++count;            // unique d
                else if (rhs == 0)
                    count += p;         // d free
            }
    return count;
}

}  // namespace

std::uint64_t sl2_order(const SquareFreeModulus& q) {
    std::uint64_t order = 1;
    for (std::uint32_t p : q.prime_factors) {
        const std::uint64_t op = sl2_order_prime(p);
        if (order > UINT64_MAX / op) throw std::overflow_error("sl2_order overflow");
        order *= op;
    }
    return order;
}

std::uint64_t sl2_order_closed_form(const SquareFreeModulus& q) {
    std::uint64_t order = 1;
    for (std::uint64_t p : q.prime_factors) order *= p * (p * p - 1);
    return order;
}

ResidueGroup::ResidueGroup(const GeneratorSystem& s, const SquareFreeModulus& q) : q_(q) {
    std::vector<ModMat2> seeds;
    for (const Mat2Z& g : s.generators()) seeds.push_back(reduce_mod(g, q));

    std::unordered_map<std::uint64_t, std::uint32_t> seen;
    std::vector<ModMat2> table;
    auto add = [&](const ModMat2& m) -> bool {
        auto [it, inserted] = seen.emplace(m.key(), static_cast<std::uint32_t>(table.size()));
        if (inserted) table.push_back(m);
        return inserted;
    };

    const ModMat2 id{1 % q.q, 0, 0, 1 % q.q};
    add(id);
    for (const auto& m : seeds) add(m);
    for (std::size_t head = 0; head < table.size(); ++head) {
        const ModMat2 cur = table[head];
        for (const auto& g : seeds) {
            const ModMat2 prod = mod_mul(g, cur, q.q);
            add(prod);
        }
    }

    elements_ = std::move(table);
    std::sort(elements_.begin(), elements_.end(),
              [](const ModMat2& x, const ModMat2& y) { return x.key() < y.key(); });
    index_.reserve(elements_.size() * 2);
    for (std::uint32_t i = 0; i < elements_.size(); ++i) index_.emplace(elements_[i].key(), i);

    id_index_ = index_.at(id.key());
    for (const auto& m : seeds) gen_images_.push_back(index_.at(m.key()));
    is_full_ = (q.q == 1) || (elements_.size() == sl2_order(q));
}

std::uint32_t ResidueGroup::index_of(const ModMat2& m) const {
    auto it = index_.find(m.key());
    if (it == index_.end())
        throw std::out_of_range("ResidueGroup::index_of: element not in closure");
    return it->second;
}

std::optional<std::uint32_t> ResidueGroup::try_index_of(const ModMat2& m) const {
    auto it = index_.find(m.key());
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::uint32_t> ResidueGroup::left_action(Letter l) const {
    return left_action_of(gen_images_.at(l));
}

std::vector<std::uint32_t> ResidueGroup::left_action_of(std::uint32_t gi) const {
    const ModMat2 g = elements_.at(gi);
    std::vector<std::uint32_t> row(elements_.size());
    for (std::uint32_t i = 0; i < elements_.size(); ++i)
        row[i] = index_.at(mod_mul(g, elements_[i], q_.q).key());
    return row;
}

std::vector<std::uint32_t> ResidueGroup::inverse_table() const {
    std::vector<std::uint32_t> inv(elements_.size());
    for (std::uint32_t i = 0; i < elements_.size(); ++i)
        inv[i] = index_.at(mod_inverse(elements_[i], q_.q).key());
    return inv;
}

bool closure_is_full(const GeneratorSystem& s, std::uint32_t p) {
    const SquareFreeModulus q = SquareFreeModulus::make(p);
    if (q.prime_factors.size() != 1)
        throw std::invalid_argument("closure_is_full: modulus must be prime");
    const std::uint64_t proper_cap =
        std::max<std::uint64_t>(120, std::max<std::uint64_t>(2 * (std::uint64_t(p) + 1),
                                                             std::uint64_t(p) * (p - 1)));
    std::vector<ModMat2> seeds;
    for (const Mat2Z& g : s.generators()) seeds.push_back(reduce_mod(g, q));

    std::unordered_map<std::uint64_t, std::uint32_t> seen;
    std::vector<ModMat2> table;
    auto add = [&](const ModMat2& m) {
        auto [it, inserted] = seen.emplace(m.key(), static_cast<std::uint32_t>(table.size()));
        if (inserted) table.push_back(m);
    };
    add(ModMat2{1 % p, 0, 0, 1 % p});
    for (const auto& m : seeds) add(m);
    for (std::size_t head = 0; head < table.size(); ++head) {
        if (table.size() > proper_cap) return true;
        const ModMat2 cur = table[head];
        for (const auto& g : seeds) add(mod_mul(g, cur, p));
    }
    return table.size() == sl2_order(q);
}

BadPrimeReport strong_approximation_scan(const GeneratorSystem& s, std::uint32_t prime_bound) {
    BadPrimeReport report;
    report.prime_bound = prime_bound;
    for (std::uint32_t p : primes_up_to(prime_bound)) {
        if (closure_is_full(s, p)) {
            report.closure_sizes.emplace_back(p, sl2_order(SquareFreeModulus::make(p)));
        } else {
            const ResidueGroup g(s, SquareFreeModulus::make(p));
            report.closure_sizes.emplace_back(p, g.size());
            report.bad_primes.push_back(p);
        }
    }
    return report;
}

bool crt_surjectivity_check(const GeneratorSystem& s, const SquareFreeModulus& q1,
                            const SquareFreeModulus& q2) {
    if (std::gcd(q1.q, q2.q) != 1)
        throw std::invalid_argument("crt_surjectivity_check: moduli must be coprime");
    const ResidueGroup g1(s, q1);
    const ResidueGroup g2(s, q2);
    const ResidueGroup g12(s, SquareFreeModulus::make(std::uint64_t(q1.q) * q2.q));
    return g12.size() == g1.size() * g2.size();
}

}  // namespace thinlab
