#include "thinlab/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace thinlab {

// --- 64-bit factorization ----------------------------------------------------

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t out = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) out = mulmod_u64(out, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return out;
}

std::uint64_t pollard_brent(std::uint64_t n, std::uint64_t seed) {
    if ((n & 1) == 0) return 2;
    std::uint64_t y = seed % n, c = 1 + seed % (n - 1), m = 128;
    std::uint64_t g = 1, r = 1, q = 1, x = 0, ys = 0;
    while (g == 1) {
        x = y;
        for (std::uint64_t i = 0; i < r; ++i) y = (mulmod_u64(y, y, n) + c) % n;
        std::uint64_t k = 0;
        while (k < r && g == 1) {
            ys = y;
            const std::uint64_t lim = std::min(m, r - k);
            for (std::uint64_t i = 0; i < lim; ++i) {
                y = (mulmod_u64(y, y, n) + c) % n;
                q = mulmod_u64(q, x > y ? x - y : y - x, n);
            }
            g = std::gcd(q, n);
            k += m;
        }
        r <<= 1;
    }
    if (g == n) {
        g = 1;
        while (g == 1) {
            ys = (mulmod_u64(ys, ys, n) + c) % n;
            g = std::gcd(x > ys ? x - ys : ys - x, n);
        }
    }
    return g;
}

void factor_u64(std::uint64_t n, std::vector<std::uint64_t>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        out.push_back(n);
        return;
    }
    std::uint64_t d = n;
    for (std::uint64_t seed = 2; d == n; ++seed) d = pollard_brent(n, seed);
    factor_u64(d, out);
    factor_u64(n / d, out);
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL,
                            31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    const std::uint64_t d0 = n - 1;
    int s = 0;
    std::uint64_t d = d0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // deterministic base set for 64-bit inputs
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL,
                            31ULL, 37ULL}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

int prime_omega(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("prime_omega: n must be positive");
    int omega = 0;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL}) {
        while (n % p == 0) {
            n /= p;
            ++omega;
        }
    }
    for (std::uint64_t p = 7; p * p <= n && p < 100000; p += 2) {
        while (n % p == 0) {
            n /= p;
            ++omega;
        }
    }
    if (n > 1) {
        std::vector<std::uint64_t> rest;
        factor_u64(n, rest);
        omega += static_cast<int>(rest.size());
    }
    return omega;
}

// --- orbit polynomials --------------------------------------------------------

mpz_class OrbitPolynomial::eval(const Mat2Z& g) const {
    mpz_class v = f.eval(g);
    if (normalization != 1) {
        mpz_class r;
        mpz_class quotient;
        mpz_fdiv_qr(quotient.get_mpz_t(), r.get_mpz_t(), v.get_mpz_t(),
                    normalization.get_mpz_t());
        if (r != 0)
            throw std::logic_error("OrbitPolynomial: normalization does not divide value");
        return quotient;
    }
    return v;
}

OrbitPolynomial normalize_primitive(const MatrixPolynomial& f, int declared_t,
                                    const GeneratorSystem& s, const BallEnumeration& ball,
                                    std::size_t sample_size) {
    (void)s;
    if (ball.in_ball.empty()) throw std::invalid_argument("normalize_primitive: empty orbit sample");
    const std::size_t n = ball.in_ball.size();
    const std::size_t first = std::min(sample_size, n);

    mpz_class g = 0;
    for (std::size_t i = 0; i < first; ++i) {
        mpz_class v = f.eval(ball.entries[ball.in_ball[i]].element);
        mpz_abs(v.get_mpz_t(), v.get_mpz_t());
        g = gcd(g, v);
        if (g == 1) break;
    }
    if (g == 0) throw std::invalid_argument("normalize_primitive: f vanishes on the sample");

    OrbitPolynomial out{f, declared_t, g};
    // fresh disjoint sample re-verification
    mpz_class g2 = 0;
    for (std::size_t i = first; i < std::min(n, 2 * first); ++i) {
        mpz_class v = out.eval(ball.entries[ball.in_ball[i]].element);
        mpz_abs(v.get_mpz_t(), v.get_mpz_t());
        g2 = gcd(g2, v);
        if (g2 == 1) break;
    }
    if (g2 > 1)
        throw std::runtime_error("normalize_primitive: normalized f still imprimitive on fresh sample");
    return out;
}

mpq_class local_density(const GeneratorSystem& s, const OrbitPolynomial& f,
                        const SquareFreeModulus& d) {
    mpq_class beta = 1;
    for (std::uint32_t p : d.prime_factors) {
        if (p > 1000)
            throw std::invalid_argument("local_density: prime " + std::to_string(p) +
                                        " beyond enumeration budget");
        std::uint64_t zeros = 0, order = 0;
        // reduce f / N mod p: N is invertible mod good primes
        const std::uint64_t n_mod =
            mpz_fdiv_ui(f.normalization.get_mpz_t(), static_cast<unsigned long>(p));
        if (n_mod == 0)
            throw std::invalid_argument("local_density: prime divides the normalization");
        if (closure_is_full(s, p)) {
            // direct SL2(F_p) enumeration: rows (a, b, c), d solved from det
            std::vector<std::uint64_t> inv(p, 0);
            if (p > 1) inv[1] = 1;
            for (std::uint64_t a = 2; a < p; ++a)
                inv[a] = (p - (p / a) * inv[p % a] % p) % p;
            for (std::uint64_t a = 0; a < p; ++a)
                for (std::uint64_t b = 0; b < p; ++b)
                    for (std::uint64_t c = 0; c < p; ++c) {
                        const std::uint64_t rhs = (1 + b * c) % p;
                        if (a != 0) {
                            const std::uint64_t dd = rhs * inv[a] % p;
                            ++order;
                            if (f.f.eval_mod(a, b, c, dd, p) == 0) ++zeros;
                        } else if (rhs == 0) {
                            for (std::uint64_t dd = 0; dd < p; ++dd) {
                                ++order;
                                if (f.f.eval_mod(a, b, c, dd, p) == 0) ++zeros;
                            }
                        }
                    }
        } else {
            const ResidueGroup closure(s, SquareFreeModulus::make(p));
            order = closure.size();
            for (const ModMat2& m : closure.elements())
                if (f.f.eval_mod(m, p) == 0) ++zeros;
        }
        mpq_class factor(zeros, order);
        factor.canonicalize();
        beta *= factor;
    }
    return beta;
}

std::uint64_t SieveSequence::progression_sum(std::uint64_t d) const {
    if (d == 0) throw std::invalid_argument("progression_sum: d must be positive");
    std::uint64_t sum = 0;
    for (const auto& [n, a_n] : values)
        if (n % d == 0) sum += a_n;
    return sum;
}

SieveSequence build_sieve_sequence(const GeneratorSystem& s, const BallEnumeration& ball,
                                   double T, const OrbitPolynomial& f,
                                   const std::vector<std::uint32_t>& excluded_primes) {
    (void)s;
    SieveSequence seq;
    seq.T = T;
    seq.excluded_primes = excluded_primes;
    constexpr std::uint64_t kValueCap = std::uint64_t{1} << 62;
    for (std::uint32_t idx : ball.in_ball) {
        ++seq.ball_count;
        mpz_class v = f.eval(ball.entries[idx].element);
        mpz_abs(v.get_mpz_t(), v.get_mpz_t());
        if (v == 0) {
            ++seq.zero_count;
        } else if (v.fits_ulong_p() || mpz_sizeinbase(v.get_mpz_t(), 2) <= 62) {
            const std::uint64_t n = mpz_get_ui(v.get_mpz_t());
            if (n < kValueCap) {
                ++seq.values[n];
                ++seq.X;
            } else {
                ++seq.unresolved;
            }
        } else {
            ++seq.unresolved;
        }
    }
    return seq;
}

std::vector<RemainderRow> remainder_table(const GeneratorSystem& s, const SieveSequence& seq,
                                          const OrbitPolynomial& f, double D,
                                          std::uint32_t beta_prime_cap) {
    std::vector<std::uint32_t> ps;
    for (std::uint32_t p : primes_up_to(beta_prime_cap)) {
        bool excluded = false;
        for (std::uint32_t b : seq.excluded_primes) excluded |= (b == p);
        if (!excluded) ps.push_back(p);
    }
    std::map<std::uint32_t, mpq_class> beta_p;
    const double d_cap = std::min(D, 10000.0);

    std::vector<RemainderRow> rows;
    // DFS over square-free products of good primes, d <= d_cap
    auto rec = [&](auto&& self, std::size_t start, std::uint64_t d, mpq_class beta) -> void {
        RemainderRow row;
        row.d = d;
        row.progression_sum = seq.progression_sum(d);
        row.beta = beta;
        row.remainder = static_cast<double>(row.progression_sum) -
                        beta.get_d() * static_cast<double>(seq.X);
        rows.push_back(row);
        for (std::size_t i = start; i < ps.size(); ++i) {
            const std::uint64_t nd = d * ps[i];
            if (static_cast<double>(nd) > d_cap) break;
            auto it = beta_p.find(ps[i]);
            if (it == beta_p.end())
                it = beta_p.emplace(ps[i], local_density(s, f, SquareFreeModulus::make(ps[i])))
                         .first;
            self(self, i + 1, nd, beta * it->second);
        }
    };
    rec(rec, 0, 1, mpq_class(1));
    std::sort(rows.begin(), rows.end(),
              [](const RemainderRow& x, const RemainderRow& y) { return x.d < y.d; });
    return rows;
}

double dimension_check_defect(const GeneratorSystem& s, const OrbitPolynomial& f,
                              double w, double z,
                              const std::vector<std::uint32_t>& excluded_primes) {
    double sum = 0.0;
    for (std::uint32_t p : primes_up_to(static_cast<std::uint32_t>(z))) {
        if (p < w) continue;
        bool excluded = false;
        for (std::uint32_t b : excluded_primes) excluded |= (b == p);
        if (excluded) continue;
        const mpq_class beta = local_density(s, f, SquareFreeModulus::make(p));
        sum += beta.get_d() * std::log(static_cast<double>(p));
    }
    return std::fabs(sum - f.declared_t * std::log(z / w));
}

std::uint64_t exact_sifted_sum(const SieveSequence& seq, double z) {
    std::vector<std::uint32_t> ps;
    for (std::uint32_t p : primes_up_to(static_cast<std::uint32_t>(std::max(0.0, z)))) {
        bool excluded = false;
        for (std::uint32_t b : seq.excluded_primes) excluded |= (b == p);
        if (!excluded) ps.push_back(p);
    }
    std::uint64_t sum = 0;
    for (const auto& [n, a_n] : seq.values) {
        bool coprime = true;
        for (std::uint32_t p : ps)
            if (n % p == 0) {
                coprime = false;
                break;
            }
        if (coprime) sum += a_n;
    }
    return sum;
}

BrunBounds fundamental_lemma_bounds(const SieveSequence& seq, double z, double D, int t) {
    BrunBounds out;
    if (!(z >= 1.0) || !(D >= 1.0))
        throw std::invalid_argument("fundamental_lemma_bounds: need z >= 1 and D >= 1");
    out.s_parameter = std::log(D) / std::log(z);   // +inf when z = 1 (no primes sifted)
    if (!(out.s_parameter > 9.0 * t))
        throw std::invalid_argument("fundamental_lemma_bounds: s = log D / log z must exceed 9 t");
    const int cap = static_cast<int>(std::ceil(9.0 * t)) + 1;
    out.truncation = cap;

    std::vector<std::uint32_t> ps;
    for (std::uint32_t p : primes_up_to(static_cast<std::uint32_t>(z))) {
        bool excluded = false;
        for (std::uint32_t b : seq.excluded_primes) excluded |= (b == p);
        if (!excluded) ps.push_back(p);
    }

    // signed sums of progression sums, by number of prime factors
    std::vector<double> level_sum(cap + 1, 0.0);
    level_sum[0] = static_cast<double>(seq.progression_sum(1));
    auto rec = [&](auto&& self, std::size_t start, std::uint64_t d, int nu) -> void {
        if (nu >= cap) return;
        for (std::size_t i = start; i < ps.size(); ++i) {
            const double nd = static_cast<double>(d) * ps[i];
            if (nd > D) continue;
            const std::uint64_t dd = d * ps[i];
            const double sign = ((nu + 1) % 2 == 0) ? 1.0 : -1.0;
            level_sum[nu + 1] += sign * static_cast<double>(seq.progression_sum(dd));
            self(self, i + 1, dd, nu + 1);
        }
    };
    rec(rec, 0, 1, 0);

    int cap_even = cap % 2 == 0 ? cap : cap - 1;
    int cap_odd = cap % 2 == 1 ? cap : cap - 1;
    double upper = 0.0, lower = 0.0;
    for (int l = 0; l <= cap; ++l) {
        if (l <= cap_even) upper += level_sum[l];
        if (l <= cap_odd) lower += level_sum[l];
    }
    out.upper = upper;
    out.lower = lower;
    return out;
}

std::uint64_t AlmostPrimeTable::at_most(int r) const {
    std::uint64_t sum = 0;
    for (const auto& [k, c] : exact_counts)
        if (k <= r) sum += c;
    return sum;
}

std::uint64_t AlmostPrimeTable::total() const {
    std::uint64_t sum = zero + unresolved;
    for (const auto& [k, c] : exact_counts) sum += c;
    return sum;
}

AlmostPrimeTable almost_prime_table(const SieveSequence& seq) {
    AlmostPrimeTable table;
    table.zero = seq.zero_count;
    table.unresolved = seq.unresolved;
    for (const auto& [n, a_n] : seq.values) table.exact_counts[prime_omega(n)] += a_n;
    return table;
}

std::uint64_t prime_count(const GeneratorSystem& s, const BallEnumeration& ball,
                          const std::vector<OrbitPolynomial>& factors) {
    (void)s;
    if (factors.empty()) throw std::invalid_argument("prime_count: no factors declared");
    std::uint64_t count = 0;
    for (std::uint32_t idx : ball.in_ball) {
        bool all_prime = true;
        for (const OrbitPolynomial& fj : factors) {
            mpz_class v = fj.eval(ball.entries[idx].element);
            mpz_abs(v.get_mpz_t(), v.get_mpz_t());
            if (v < 2 || mpz_sizeinbase(v.get_mpz_t(), 2) > 62 ||
                !is_prime_u64(mpz_get_ui(v.get_mpz_t()))) {
                all_prime = false;
                break;
            }
        }
        if (all_prime) ++count;
    }
    return count;
}

}  // namespace thinlab
