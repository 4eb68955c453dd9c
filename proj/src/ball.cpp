#include "thinlab/ball.hpp"

#include <algorithm>
#include <array>
#include <cmath>


#include "thinlab/parallel.hpp"

namespace thinlab {

namespace {

// sigma_min(g) * sqrt(2) as a double, from the exact norm_sq N:
// sigma_min^2 = (N - sqrt(N^2 - 4)) / 2 for det 1.
double sqrt2_sigma_min(double N) {
    const double disc = std::sqrt(std::max(0.0, N * N - 4.0));
    return std::sqrt(std::max(0.0, N - disc));
}

// Open-addressed hash table of arena ids, equality resolved by the caller.
class IdTable {
public:
    explicit IdTable(std::size_t expect = 1024) { rehash(expect * 2); }

    template <class Eq>
    std::uint32_t find(std::size_t h, const Eq& eq) const {
        std::size_t i = h & mask_;
        while (slots_[i].id != kEmpty) {
            if (slots_[i].hash == h && eq(slots_[i].id)) return slots_[i].id;
            i = (i + 1) & mask_;
        }
        return kEmpty;
    }

    void insert(std::size_t h, std::uint32_t id) {
        if ((count_ + 1) * 10 > slots_.size() * 7) grow();
        std::size_t i = h & mask_;
        while (slots_[i].id != kEmpty) i = (i + 1) & mask_;
        slots_[i] = Slot{h, id};
        ++count_;
    }

    static constexpr std::uint32_t kEmpty = 0xffffffffu;

private:
    struct Slot {
        std::size_t hash = 0;
        std::uint32_t id = kEmpty;
    };
    std::vector<Slot> slots_;
    std::size_t mask_ = 0;
    std::size_t count_ = 0;

    void rehash(std::size_t want) {
        std::size_t cap = 64;
        while (cap < want) cap <<= 1;
        slots_.assign(cap, Slot{});
        mask_ = cap - 1;
        count_ = 0;
    }

    void grow() {
        std::vector<Slot> old = std::move(slots_);
        rehash(old.size() * 2);
        for (const Slot& s : old)
            if (s.id != kEmpty) {
                std::size_t i = s.hash & mask_;
                while (slots_[i].id != kEmpty) i = (i + 1) & mask_;
                slots_[i] = s;
                ++count_;
            }
    }
};

// --- element representations -------------------------------------------------
//
// The search runs either on plain int64 quadruples (exact whenever the
// guard below certifies no intermediate can overflow) or on mpz matrices.

struct I64Rep {
    struct Elem {
        std::int64_t a, b, c, d, norm;
        bool operator==(const Elem& o) const {
            return a == o.a && b == o.b && c == o.c && d == o.d;
        }
    };

    static Elem from_exact(const Mat2Z& m) {
        Elem e{m.a.get_si(), m.b.get_si(), m.c.get_si(), m.d.get_si(), 0};
        e.norm = e.a * e.a + e.b * e.b + e.c * e.c + e.d * e.d;
        return e;
    }

    static Elem mul(const Elem& g, const Elem& x) {
        Elem e{g.a * x.a + g.b * x.c, g.a * x.b + g.b * x.d,
               g.c * x.a + g.d * x.c, g.c * x.b + g.d * x.d, 0};
        e.norm = e.a * e.a + e.b * e.b + e.c * e.c + e.d * e.d;
        return e;
    }

    // exact n <= bound for integer n and double bound
    static bool norm_le(const Elem& e, double bound) {
        if (bound >= 9.3e18) return true;
        if (bound < 0.0) return false;
        return e.norm <= static_cast<std::int64_t>(std::floor(bound));
    }

    static double norm_value(const Elem& e) { return static_cast<double>(e.norm); }

    static std::size_t hash(const Elem& e) {
        std::size_t h = 0x243f6a8885a308d3ULL;
        for (std::int64_t v : {e.a, e.b, e.c, e.d}) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }

    static void fill_entry(const Elem& e, BallEntry& out) {
        out.element = Mat2Z(static_cast<long>(e.a), static_cast<long>(e.b),
                            static_cast<long>(e.c), static_cast<long>(e.d));
        out.norm_sq = static_cast<long>(0);
        mpz_set_si(out.norm_sq.get_mpz_t(), e.norm);
    }
};

struct MpzRep {
    struct Elem {
        Mat2Z m;
        mpz_class norm;
        bool operator==(const Elem& o) const { return m == o.m; }
    };

    static Elem from_exact(const Mat2Z& m) { return Elem{m, matrix_norm_sq(m)}; }

    static Elem mul(const Elem& g, const Elem& x) {
        Elem e{g.m * x.m, 0};
        e.norm = matrix_norm_sq(e.m);
        return e;
    }

    static bool norm_le(const Elem& e, double bound) {
        return mpz_cmp_d(e.norm.get_mpz_t(), bound) <= 0;
    }

    static double norm_value(const Elem& e) { return e.norm.get_d(); }

    static std::size_t hash(const Elem& e) { return Mat2ZHash{}(e.m); }

    static void fill_entry(const Elem& e, BallEntry& out) {
        out.element = e.m;
        out.norm_sq = e.norm;
    }
};

template <class Rep>
BallEnumeration run_bfs(const GeneratorSystem& s, double T, const BallOptions& opt) {
    using Elem = typename Rep::Elem;
    const int threads = resolve_thread_count(opt.threads);
    const double T_sq = T * T;
    const double window = opt.window_slack * T + opt.window_pad;
    const double window_sq = window * window;

    std::vector<Elem> gens;
    for (const Mat2Z& g : s.generators()) gens.push_back(Rep::from_exact(g));

    struct Meta {
        std::uint16_t word_length;
        std::int32_t parent;
        Letter via;
    };
    std::vector<Elem> arena;
    std::vector<Meta> meta;
    std::vector<std::uint64_t> state_mask;
    IdTable index;
    bool truncated = false;

    auto intern = [&](Elem&& e, std::uint16_t len, std::int32_t parent, Letter via,
                      std::size_t h) -> std::uint32_t {
        if (arena.size() >= opt.element_budget) {
            truncated = true;
            return IdTable::kEmpty;
        }
        const auto id = static_cast<std::uint32_t>(arena.size());
        arena.push_back(std::move(e));
        meta.push_back(Meta{len, parent, via});
        state_mask.push_back(0);
        index.insert(h, id);
        return id;
    };

    {
        Elem id_elem = Rep::from_exact(Mat2Z{});
        const std::size_t h = Rep::hash(id_elem);
        intern(std::move(id_elem), 0, -1, 0, h);
    }

    std::vector<std::pair<std::uint32_t, Letter>> frontier;
    for (Letter j = 0; j < s.alphabet_size(); ++j) {
        Elem e = gens[j];
        if (!Rep::norm_le(e, window_sq)) continue;
        const std::size_t h = Rep::hash(e);
        std::uint32_t id = index.find(h, [&](std::uint32_t x) { return arena[x] == e; });
        if (id == IdTable::kEmpty) id = intern(std::move(e), 1, 0, j, h);
        if (id == IdTable::kEmpty) break;
        const std::uint64_t bit = std::uint64_t{1} << j;
        if (!(state_mask[id] & bit)) {
            state_mask[id] |= bit;
            frontier.emplace_back(id, j);
        }
    }

    struct Candidate {
        Elem e;
        std::int32_t parent;
        Letter via;
    };

    int level = 1;
    while (!frontier.empty() && !truncated) {
        if (opt.max_word_length > 0 && level >= opt.max_word_length) break;
        ++level;

        std::vector<std::vector<Candidate>> produced(threads);
        parallel_chunks(frontier.size(), threads,
                        [&](int worker, std::size_t lo, std::size_t hi) {
            auto& local = produced[worker];
            for (std::size_t f = lo; f < hi; ++f) {
                const auto [id, last] = frontier[f];
                if (sqrt2_sigma_min(Rep::norm_value(arena[id])) > T) continue;
                for (Letter j = 0; j < s.alphabet_size(); ++j) {
                    if (!s.transition(last, j)) continue;
                    Elem e = Rep::mul(gens[j], arena[id]);
                    if (!Rep::norm_le(e, window_sq)) continue;
                    local.push_back(Candidate{std::move(e), static_cast<std::int32_t>(id), j});
                }
            }
        });

        frontier.clear();
        for (auto& local : produced) {
            if (truncated) break;
            for (auto& c : local) {
                const std::size_t h = Rep::hash(c.e);
                std::uint32_t id =
                    index.find(h, [&](std::uint32_t x) { return arena[x] == c.e; });
                if (id == IdTable::kEmpty) {
                    id = intern(std::move(c.e), static_cast<std::uint16_t>(level), c.parent,
                                c.via, h);
                    if (id == IdTable::kEmpty) break;
                }
                const std::uint64_t bit = std::uint64_t{1} << c.via;
                if (!(state_mask[id] & bit)) {
                    state_mask[id] |= bit;
                    frontier.emplace_back(id, c.via);
                }
            }
        }
    }

    BallEnumeration out;
    out.truncated = truncated;
    out.entries.resize(arena.size());
    for (std::size_t i = 0; i < arena.size(); ++i) {
        Rep::fill_entry(arena[i], out.entries[i]);
        out.entries[i].word_length = meta[i].word_length;
        out.entries[i].parent = meta[i].parent;
        out.entries[i].via = meta[i].via;
    }
    for (std::uint32_t i = 0; i < out.entries.size(); ++i)
        if (mpz_cmp_d(out.entries[i].norm_sq.get_mpz_t(), T_sq) <= 0) out.in_ball.push_back(i);
    std::sort(out.in_ball.begin(), out.in_ball.end(), [&](std::uint32_t x, std::uint32_t y) {
        const int c = cmp(out.entries[x].norm_sq, out.entries[y].norm_sq);
        if (c != 0) return c < 0;
        return lex_less(out.entries[x].element, out.entries[y].element);
    });
    return out;
}

}  // namespace

Word BallEnumeration::word_of(std::size_t idx) const {
    Word w;
    std::int32_t cur = static_cast<std::int32_t>(idx);
    while (cur >= 0 && entries[cur].parent >= 0) {
        w.push_back(entries[cur].via);
        cur = entries[cur].parent;
    }
    std::reverse(w.begin(), w.end());
    return w;
}

BallEnumeration enumerate_ball(const GeneratorSystem& s, double T, const BallOptions& opt) {
    if (!(T > 0)) throw std::invalid_argument("enumerate_ball: T must be positive");
    if (s.alphabet_size() > 64)
        throw std::invalid_argument("enumerate_ball: alphabet too large");

    // int64 is exact while every intermediate entry stays below 2^30:
    // a candidate entry is bounded by 2 * max gen entry * window.
    const double window = opt.window_slack * T + opt.window_pad;
    double max_gen_entry = 0.0;
    for (const Mat2Z& g : s.generators())
        for (const mpz_class* v : {&g.a, &g.b, &g.c, &g.d})
            max_gen_entry = std::max(max_gen_entry, std::fabs(v->get_d()));
    const bool fits_i64 = 2.0 * max_gen_entry * (window + 1.0) < 1073741824.0;

    return fits_i64 ? run_bfs<I64Rep>(s, T, opt) : run_bfs<MpzRep>(s, T, opt);
}

std::vector<Mat2Z> exhaustive_ball_oracle(const GeneratorSystem& s, double T, int max_len) {
    const double T_sq = T * T;
    std::vector<Mat2Z> found;
    IdTable seen;

    auto record = [&](const Mat2Z& m) {
        if (mpz_cmp_d(matrix_norm_sq(m).get_mpz_t(), T_sq) > 0) return;
        const std::size_t h = Mat2ZHash{}(m);
        if (seen.find(h, [&](std::uint32_t x) { return found[x] == m; }) != IdTable::kEmpty)
            return;
        seen.insert(h, static_cast<std::uint32_t>(found.size()));
        found.push_back(m);
    };

    record(Mat2Z{});
    struct Frame {
        Mat2Z m;
        Letter last;
        int depth;
    };
    std::vector<Frame> stack;
    for (Letter j = 0; j < s.alphabet_size(); ++j) stack.push_back(Frame{s.generator(j), j, 1});
    while (!stack.empty()) {
        Frame fr = std::move(stack.back());
        stack.pop_back();
        record(fr.m);
        if (fr.depth >= max_len) continue;
        for (Letter j = 0; j < s.alphabet_size(); ++j) {
            if (!s.transition(fr.last, j)) continue;
            stack.push_back(Frame{s.generator(j) * fr.m, j, fr.depth + 1});
        }
    }
    std::sort(found.begin(), found.end(), lex_less);
    return found;
}

}  // namespace thinlab
