#include "thinlab/shift.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "thinlab/parallel.hpp"

namespace thinlab {

namespace {

bool fixes(const Mat2Z& g, const RationalPoint& w) {
    const RationalPoint gw = mobius_apply(g, w);
    return gw.x == w.x && gw.y == w.y;
}

// Builds the periodic extension of `word` truncated to `total` letters:
// the last |word| letters are the word itself, deeper copies are packed in
// front, junction letters inserted where the word cannot follow itself.
Word periodic_extension(const GeneratorSystem& s, const Word& word, std::size_t total) {
    Word block = word;
    if (!s.transition(word.back(), word.front())) {
        Letter junction = 0;
        bool found = false;
        for (Letter l = 0; l < s.alphabet_size(); ++l) {
            if (s.transition(word.back(), l) && s.transition(l, word.front())) {
                junction = l;
                found = true;
                break;
            }
        }
        if (!found) throw std::logic_error("periodic_extension: no junction letter");
        block.push_back(junction);   // block = (word, junction); blocks chain admissibly
    }
    Word ext = word;
    while (ext.size() < total) ext.insert(ext.begin(), block.begin(), block.end());
    if (ext.size() > total) ext.erase(ext.begin(), ext.begin() + (ext.size() - total));
    return ext;
}

struct TailDistances {
    double full = 0.0;        // d(o, mat(ext) w)
    double drop_last = 0.0;   // d(o, mat(ext minus last) w)
    double drop_depth = 0.0;  // d(o, mat(ext minus last n) w)
};

TailDistances chain_distances(const GeneratorSystem& s, const RationalPoint& w, const Word& ext,
                              std::size_t depth) {
    const RationalPoint origin;   // i
    TailDistances out;
    RationalPoint z = w;
    const std::size_t L = ext.size();
    for (std::size_t t = 0; t < L; ++t) {
        if (t == L - depth) out.drop_depth = hyp_distance(origin, z);
        if (t == L - 1) out.drop_last = hyp_distance(origin, z);
        z = mobius_apply(s.generator(ext[t]), z);
    }
    out.full = hyp_distance(origin, z);
    return out;
}

}  // namespace

SubshiftSpec::SubshiftSpec(GeneratorSystem sys) : system(std::move(sys)), basepoint() {
    if (system.rank() < 2)
        throw std::invalid_argument("SubshiftSpec: need k >= 2 generator pairs");
    RationalPoint w;   // i
    for (const Mat2Z& g : system.generators()) {
        if (fixes(g, w)) {
            w = RationalPoint(mpq_class(1, 2), mpq_class(1));
            break;
        }
    }
    for (int len = 1; len <= 6; ++len) {
        for (const Word& word : admissible_words(system, len)) {
            const Mat2Z m = word_to_matrix(system, word);
            if (is_identity(m) || is_identity(-m)) continue;   // acts trivially on H
            if (fixes(m, w))
                throw std::invalid_argument(
                    "SubshiftSpec: basepoint fixed by a word of length " + std::to_string(len));
        }
    }
    basepoint = w;
}

std::vector<Word> admissible_words(const GeneratorSystem& s, int length) {
    std::vector<Word> out;
    if (length <= 0) return out;
    Word cur;
    auto rec = [&](auto&& self, int remaining) -> void {
        if (remaining == 0) {
            out.push_back(cur);
            return;
        }
        for (Letter j = 0; j < s.alphabet_size(); ++j) {
            if (!cur.empty() && !s.transition(cur.back(), j)) continue;
            cur.push_back(j);
            self(self, remaining - 1);
            cur.pop_back();
        }
    };
    rec(rec, length);
    return out;
}

CylinderGrid::CylinderGrid(const SubshiftSpec& spec, int depth, int tail_pad, int threads)
    : depth_(depth), tail_pad_(tail_pad) {
    if (depth < 1) throw std::invalid_argument("CylinderGrid: depth must be >= 1");
    const GeneratorSystem& s = spec.system;
    degree_ = static_cast<int>(s.alphabet_size()) - 1;
    for (Letter l = 0; l < s.alphabet_size(); ++l) inverse_of_.push_back(s.inverse_of(l));

    bits_per_letter_ = 1;
    while ((std::size_t{1} << bits_per_letter_) < s.alphabet_size()) ++bits_per_letter_;
    if (bits_per_letter_ * static_cast<std::size_t>(depth) > 64)
        throw std::invalid_argument("CylinderGrid: depth too large for packed index");

    words_ = admissible_words(s, depth);

    std::unordered_map<std::uint64_t, std::uint32_t> index;
    auto pack = [&](const Word& w) {
        std::uint64_t key = 0;
        for (Letter l : w) key = (key << bits_per_letter_) | l;
        return key;
    };
    index.reserve(words_.size() * 2);
    for (std::uint32_t i = 0; i < words_.size(); ++i) index.emplace(pack(words_[i]), i);

    succ_.assign(words_.size() * degree_, 0);
    succ_letter_.assign(words_.size() * degree_, 0);
    pred_.assign(words_.size() * degree_, 0);
    for (std::uint32_t v = 0; v < words_.size(); ++v) {
        const Word& w = words_[v];
        int t = 0;
        for (Letter j = 0; j < s.alphabet_size(); ++j) {
            if (!s.transition(w.back(), j)) continue;
            Word nxt(w.begin() + 1, w.end());
            nxt.push_back(j);
            succ_[v * degree_ + t] = index.at(pack(nxt));
            succ_letter_[v * degree_ + t] = j;
            ++t;
        }
        t = 0;
        for (Letter i = 0; i < s.alphabet_size(); ++i) {
            if (!s.transition(i, w.front())) continue;
            Word prv;
            prv.push_back(i);
            prv.insert(prv.end(), w.begin(), w.end() - 1);
            pred_[v * degree_ + t] = index.at(pack(prv));
            ++t;
        }
    }

    tau_.resize(static_cast<Eigen::Index>(words_.size()));
    birkhoff_.resize(static_cast<Eigen::Index>(words_.size()));
    const std::size_t total = static_cast<std::size_t>(depth) + tail_pad_;
    parallel_chunks(words_.size(), resolve_thread_count(threads),
                    [&](int, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const Word ext = periodic_extension(s, words_[i], total);
            const TailDistances d = chain_distances(s, spec.basepoint, ext,
                                                    static_cast<std::size_t>(depth));
            tau_[static_cast<Eigen::Index>(i)] = d.full - d.drop_last;
            birkhoff_[static_cast<Eigen::Index>(i)] = d.full - d.drop_depth;
        }
    });
}

std::uint32_t CylinderGrid::index_of(const Word& w) const {
    if (static_cast<int>(w.size()) != depth_)
        throw std::invalid_argument("CylinderGrid::index_of: wrong word length");
    std::uint64_t key = 0;
    for (Letter l : w) key = (key << bits_per_letter_) | l;
    // recover by binary search over lex-sorted words: words_ are generated in
    // lex order, and packed keys are lex-monotone at fixed length
    std::uint32_t lo = 0, hi = static_cast<std::uint32_t>(words_.size());
    while (lo < hi) {
        const std::uint32_t mid = lo + (hi - lo) / 2;
        std::uint64_t mk = 0;
        for (Letter l : words_[mid]) mk = (mk << bits_per_letter_) | l;
        if (mk < key)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo == words_.size() || words_[lo] != w)
        throw std::invalid_argument("CylinderGrid::index_of: inadmissible word");
    return lo;
}

std::vector<Word> CylinderGrid::refinements(std::size_t v) const {
    std::vector<Word> out;
    const Word& w = words_[v];
    // a refinement specifies one deeper letter, stored at the front
    for (Letter j = 0; j < inverse_of_.size(); ++j) {
        if (inverse_of_[j] == w.front()) continue;   // backtracking junction
        Word r;
        r.push_back(j);
        r.insert(r.end(), w.begin(), w.end());
        out.push_back(std::move(r));
    }
    return out;
}

double tau_eval(const SubshiftSpec& spec, const Word& word, int tail_pad) {
    if (word.empty()) throw std::invalid_argument("tau_eval: empty word");
    if (!spec.system.is_admissible(word)) throw std::invalid_argument("tau_eval: inadmissible word");
    const Word ext = tail_pad > 0 ? periodic_extension(spec.system, word, word.size() + tail_pad)
                                  : word;
    const TailDistances d = chain_distances(spec.system, spec.basepoint, ext, word.size());
    return d.full - d.drop_last;
}

double birkhoff_eval(const SubshiftSpec& spec, const Word& word, int tail_pad) {
    if (word.empty()) throw std::invalid_argument("birkhoff_eval: empty word");
    if (!spec.system.is_admissible(word))
        throw std::invalid_argument("birkhoff_eval: inadmissible word");
    const Word ext = tail_pad > 0 ? periodic_extension(spec.system, word, word.size() + tail_pad)
                                  : word;
    const TailDistances d = chain_distances(spec.system, spec.basepoint, ext, word.size());
    return d.full - d.drop_depth;
}

HolderFit fit_holder_constants(const SubshiftSpec& spec, int n_min, int n_max) {
    if (n_min < 1 || n_max < n_min)
        throw std::invalid_argument("fit_holder_constants: need 1 <= n_min <= n_max");
    HolderFit fit;
    for (int n = n_min; n <= n_max; ++n) {
        const CylinderGrid coarse(spec, n);
        const CylinderGrid fine(spec, n + 1);
        double var = 0.0;
        for (std::size_t v = 0; v < coarse.size(); ++v) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const Word& r : coarse.refinements(v)) {
                const double t = fine.tau(fine.index_of(r));
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
            var = std::max(var, hi - lo);
        }
        fit.variations.emplace_back(n, var);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, var] : fit.variations) {
        const double x = n, y = std::log(std::max(var, 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double count = static_cast<double>(fit.variations.size());
    const double denom = count * sxx - sx * sx;
    if (denom != 0.0) {
        const double slope = (count * sxy - sx * sy) / denom;
        fit.rho = std::exp(slope);
        fit.tau_norm = std::exp((sy - slope * sx) / count);
    }
    return fit;
}

EventualPositivityResult eventual_positivity_check(const SubshiftSpec& spec, int m_max) {
    EventualPositivityResult res;
    for (int m = 1; m <= m_max; ++m) {
        double worst = std::numeric_limits<double>::infinity();
        Word worst_word;
        for (const Word& w : admissible_words(spec.system, m)) {
            const double sm = birkhoff_eval(spec, w, CylinderGrid::kDefaultTailPad);
            if (sm < worst) {
                worst = sm;
                worst_word = w;
            }
        }
        res.min_birkhoff = worst;
        res.worst_cylinder = worst_word;
        if (worst > 0.0) {
            res.m = m;
            return res;
        }
    }
    res.m.reset();
    return res;
}

}  // namespace thinlab
