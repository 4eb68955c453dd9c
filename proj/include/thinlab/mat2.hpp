#pragma once

// Exact 2x2 integer matrices of determinant one, the elements of the group
// under study. Entries are arbitrary-precision: word products grow
// exponentially in word length and must never overflow.

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

namespace thinlab {

struct Mat2Z {
    mpz_class a, b, c, d;   // [[a, b], [c, d]]

    Mat2Z() : a(1), b(0), c(0), d(1) {}
    Mat2Z(mpz_class a_, mpz_class b_, mpz_class c_, mpz_class d_)
        : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {}
    Mat2Z(long a_, long b_, long c_, long d_) : a(a_), b(b_), c(c_), d(d_) {}

    bool operator==(const Mat2Z& o) const {
        return a == o.a && b == o.b && c == o.c && d == o.d;
    }
    bool operator!=(const Mat2Z& o) const { return !(*this == o); }
};

inline Mat2Z operator*(const Mat2Z& x, const Mat2Z& y) {
    return Mat2Z(x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                 x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d);
}

inline Mat2Z operator-(const Mat2Z& x) { return Mat2Z(-x.a, -x.b, -x.c, -x.d); }

inline mpz_class det(const Mat2Z& g) { return g.a * g.d - g.b * g.c; }

// For det = 1 the inverse is the adjugate.
inline Mat2Z inverse(const Mat2Z& g) { return Mat2Z(g.d, -g.b, -g.c, g.a); }

inline mpz_class matrix_norm_sq(const Mat2Z& g) {
    return g.a * g.a + g.b * g.b + g.c * g.c + g.d * g.d;
}

inline bool is_identity(const Mat2Z& g) {
    return g.a == 1 && g.b == 0 && g.c == 0 && g.d == 1;
}

inline std::ostream& operator<<(std::ostream& os, const Mat2Z& g) {
    return os << "[[" << g.a << "," << g.b << "],[" << g.c << "," << g.d << "]]";
}

// Lexicographic order on (a,b,c,d); used for canonical output ordering.
inline bool lex_less(const Mat2Z& x, const Mat2Z& y) {
    if (int c0 = cmp(x.a, y.a)) return c0 < 0;
    if (int c1 = cmp(x.b, y.b)) return c1 < 0;
    if (int c2 = cmp(x.c, y.c)) return c2 < 0;
    return cmp(x.d, y.d) < 0;
}

inline std::size_t hash_mpz(const mpz_class& z, std::size_t seed) {
    const mpz_srcptr p = z.get_mpz_t();
    std::size_t h = seed ^ static_cast<std::size_t>(p->_mp_size) * 0x9e3779b97f4a7c15ULL;
    const int n = std::abs(p->_mp_size);
    for (int i = 0; i < n; ++i) {
        h ^= static_cast<std::size_t>(p->_mp_d[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

struct Mat2ZHash {
    std::size_t operator()(const Mat2Z& g) const {
        std::size_t h = hash_mpz(g.a, 0x243f6a8885a308d3ULL);
        h = hash_mpz(g.b, h);
        h = hash_mpz(g.c, h);
        h = hash_mpz(g.d, h);
        return h;
    }
};

}  // namespace thinlab
