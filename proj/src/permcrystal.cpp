#include "pdiv/permcrystal.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pdiv {

PermutationDatum::PermutationDatum(size_t r, const std::vector<size_t>& pi,
                                   const std::vector<size_t>& marked)
    : r_(r) {
    if (r == 0) throw std::invalid_argument("datum: r must be positive");
    if (pi.size() != r) throw std::invalid_argument("datum: pi must list r images");
    pi_.assign(r + 1, 0);
    pi_inv_.assign(r + 1, 0);
    marked_.assign(r + 1, false);
    for (size_t s = 1; s <= r; ++s) {
        const size_t img = pi[s - 1];
        if (img < 1 || img > r) throw std::invalid_argument("datum: image out of range");
        if (pi_inv_[img] != 0) throw std::invalid_argument("datum: pi is not a bijection");
        pi_[s] = img;
        pi_inv_[img] = s;
    }
    for (size_t s : marked) {
        if (s < 1 || s > r) throw std::invalid_argument("datum: marked index out of range");
        if (!marked_[s]) ++d_;
        marked_[s] = true;
    }
    cycle_of_.assign(r + 1, 0);
    std::vector<bool> seen(r + 1, false);
    for (size_t s = 1; s <= r; ++s) {
        if (seen[s]) continue;
        std::vector<size_t> cyc;
        size_t t = s;
        do {
            seen[t] = true;
            cycle_of_[t] = cycles_.size();
            cyc.push_back(t);
            t = pi_[t];
        } while (t != s);
        cycles_.push_back(std::move(cyc));
    }
}

std::vector<size_t> PermutationDatum::marked_list() const {
    std::vector<size_t> m;
    for (size_t s = 1; s <= r_; ++s)
        if (marked_[s]) m.push_back(s);
    return m;
}

std::vector<size_t> PermutationDatum::pi_list() const {
    return std::vector<size_t>(pi_.begin() + 1, pi_.end());
}

PermutationDatum PermutationDatum::restrict_to_cycle(size_t cycle_index) const {
    const std::vector<size_t>& cyc = cycles_.at(cycle_index);
    const size_t n = cyc.size();
    std::vector<size_t> pi(n), marked;
    for (size_t k = 0; k < n; ++k) {
        pi[k] = (k + 1 < n) ? k + 2 : 1;  // compressed traversal order
        if (marked_[cyc[k]]) marked.push_back(k + 1);
    }
    return PermutationDatum(n, pi, marked);
}

long eta(const PermutationDatum& datum, long q, size_t s) {
    if (q < 1) throw std::invalid_argument("eta: q must be positive");
    if (s < 1 || s > datum.r()) throw std::invalid_argument("eta: index out of range");
    long count = 0;
    size_t t = s;
    for (long j = 0; j < q; ++j) {
        if (datum.marked(t)) ++count;
        t = datum.image(t);
    }
    return count;
}

std::string canonical_rotation(const std::string& w) {
    std::string best = w;
    std::string rot = w;
    for (size_t k = 1; k < w.size(); ++k) {
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
        if (rot < best) best = rot;
    }
    return best;
}

std::vector<CycleStats> cycle_stats(const PermutationDatum& datum) {
    std::vector<CycleStats> out;
    for (const std::vector<size_t>& cyc : datum.cycles()) {
        CycleStats st;
        st.support = cyc;
        std::sort(st.support.begin(), st.support.end());
        st.r_i = cyc.size();
        for (size_t s : cyc)
            if (datum.marked(s)) ++st.d_i;
        st.c_i = st.r_i - st.d_i;
        st.slope = Rat(static_cast<long>(st.d_i), static_cast<long>(st.r_i));
        const long m = std::gcd(static_cast<long>(st.c_i), static_cast<long>(st.d_i));
        st.r1 = static_cast<long>(st.r_i) / m;
        st.d1 = static_cast<long>(st.d_i) / m;

        // eta tables along the cycle, up to the full cycle length.
        const long n = static_cast<long>(st.r_i);
        std::vector<std::vector<long>> etas(cyc.size());
        for (size_t k = 0; k < cyc.size(); ++k) {
            etas[k].assign(static_cast<size_t>(n) + 1, 0);
            size_t t = cyc[k];
            for (long q = 1; q <= n; ++q) {
                etas[k][static_cast<size_t>(q)] =
                    etas[k][static_cast<size_t>(q - 1)] + (datum.marked(t) ? 1 : 0);
                t = datum.image(t);
            }
        }
        // Quasi-special period: smallest multiple t of r1 dividing r_i with
        // eta_t constant on the cycle and equal to t * slope.
        st.r2 = n;
        st.d2 = static_cast<long>(st.d_i);
        for (long t = st.r1; t <= n; t += st.r1) {
            if (n % t != 0) continue;
            const long want = t * st.d1 / st.r1;
            bool ok = true;
            for (size_t k = 0; k < cyc.size() && ok; ++k)
                ok = (etas[k][static_cast<size_t>(t)] == want);
            if (ok) {
                st.r2 = t;
                st.d2 = want;
                break;
            }
        }
        st.special = (st.r2 == st.r1);
        for (long q = 1; q <= st.r2; ++q) {
            long lo = etas[0][static_cast<size_t>(q)], hi = lo;
            for (size_t k = 1; k < cyc.size(); ++k) {
                lo = std::min(lo, etas[k][static_cast<size_t>(q)]);
                hi = std::max(hi, etas[k][static_cast<size_t>(q)]);
            }
            st.alpha.push_back(lo);
            st.beta.push_back(hi);
            st.delta.push_back(hi - lo);
        }
        std::string word;
        for (size_t s : cyc) word.push_back(datum.marked(s) ? '1' : '0');
        st.word = canonical_rotation(word);
        out.push_back(std::move(st));
    }
    return out;
}

namespace {

Rat slope_of(const PermutationDatum& datum, size_t s) {
    const std::vector<size_t>& cyc = datum.cycles()[datum.cycle_of(s)];
    long d = 0;
    for (size_t t : cyc)
        if (datum.marked(t)) ++d;
    return Rat(d, static_cast<long>(cyc.size()));
}

}  // namespace

namespace {

/* Forward deficiency: smallest ell making all forward iterates of the
 * map e_t -> e_s integral. */
long forward_deficiency(const PermutationDatum& datum, size_t s, size_t t, long window) {
    long best = 0, hs = 0, ht = 0;
    size_t xs = s, xt = t;
    for (long q = 1; q <= window; ++q) {
        if (datum.marked(xs)) ++hs;
        if (datum.marked(xt)) ++ht;
        xs = datum.image(xs);
        xt = datum.image(xt);
        best = std::max(best, ht - hs);
    }
    return best;
}

long backward_deficiency(const PermutationDatum& datum, size_t s, size_t t, long window) {
    long best = 0, hs = 0, ht = 0;
    size_t xs = s, xt = t;
    for (long q = 1; q <= window; ++q) {
        xs = datum.preimage(xs);
        xt = datum.preimage(xt);
        if (datum.marked(xs)) ++hs;
        if (datum.marked(xt)) ++ht;
        best = std::max(best, hs - ht);
    }
    return best;
}

}  // namespace

long pair_deficiency(const PermutationDatum& datum, size_t s, size_t t) {
    if (s < 1 || s > datum.r() || t < 1 || t > datum.r())
        throw std::invalid_argument("pair_deficiency: index out of range");
    const long rs = static_cast<long>(datum.cycles()[datum.cycle_of(s)].size());
    const long rt = static_cast<long>(datum.cycles()[datum.cycle_of(t)].size());
    const long o = std::lcm(rs, rt);
    const long window = o * (o + 1);  // covers the drift-free sup exactly
    const Rat slope_s = slope_of(datum, s), slope_t = slope_of(datum, t);
    if (slope_s > slope_t) return forward_deficiency(datum, s, t, window);
    if (slope_s < slope_t) return backward_deficiency(datum, s, t, window);
    // Equal slopes sit in the two-sided part, so the pair number is
    // orientation-symmetric.
    return std::max(forward_deficiency(datum, s, t, window),
                    forward_deficiency(datum, t, s, window));
}

PermTorsion perm_level_torsion(const PermutationDatum& datum) {
    PermTorsion out;
    bool all_pure = true, some_marked = false, some_unmarked = false;
    for (const std::vector<size_t>& cyc : datum.cycles()) {
        size_t d = 0;
        for (size_t s : cyc)
            if (datum.marked(s)) ++d;
        if (d == cyc.size())
            some_marked = true;
        else if (d == 0)
            some_unmarked = true;
        else
            all_pure = false;
    }
    out.epsilon = (all_pure && some_marked && some_unmarked) ? 1 : 0;
    out.rule = out.epsilon ? 'a' : 'b';
    long best = out.epsilon;
    for (size_t s = 1; s <= datum.r(); ++s)
        for (size_t t = 1; t <= datum.r(); ++t)
            if (s != t) best = std::max(best, pair_deficiency(datum, s, t));
    out.ell = best;
    out.n = best;
    return out;
}

bool is_minimal(const PermutationDatum& datum) {
    for (const std::vector<size_t>& cyc : datum.cycles()) {
        const long n = static_cast<long>(cyc.size());
        long d = 0;
        for (size_t s : cyc)
            if (datum.marked(s)) ++d;
        for (size_t s : cyc) {
            long h = 0;
            size_t t = s;
            for (long q = 1; q <= n; ++q) {
                if (datum.marked(t)) ++h;
                t = datum.image(t);
                const long floor_qa = (q * d) / n;
                if (h != floor_qa && h != floor_qa + 1) return false;
            }
        }
    }
    return true;
}

bool is_special(const PermutationDatum& datum) {
    for (const CycleStats& st : cycle_stats(datum))
        if (!st.special) return false;
    return true;
}

std::string NecklaceClass::str() const {
    std::string s;
    for (size_t i = 0; i < words.size(); ++i) {
        if (i) s.push_back('|');
        s += words[i];
    }
    return s;
}

NecklaceClass necklace_class(const PermutationDatum& datum) {
    NecklaceClass cls;
    for (const std::vector<size_t>& cyc : datum.cycles()) {
        std::string word;
        for (size_t s : cyc) word.push_back(datum.marked(s) ? '1' : '0');
        cls.words.push_back(canonical_rotation(word));
    }
    std::sort(cls.words.begin(), cls.words.end(), [](const std::string& a, const std::string& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    return cls;
}

PermutationDatum dual_datum(const PermutationDatum& datum) {
    std::vector<size_t> marked;
    for (size_t s = 1; s <= datum.r(); ++s)
        if (!datum.marked(s)) marked.push_back(s);
    return PermutationDatum(datum.r(), datum.pi_list(), marked);
}

FIsocrystal to_isocrystal(const PermutationDatum& datum, const Int& p) {
    const size_t r = datum.r();
    RatMat a(r, r);
    for (size_t s = 1; s <= r; ++s)
        a.at(datum.image(s) - 1, s - 1) = datum.marked(s) ? Rat(p) : Rat(1);

    // Splitting: cycles grouped by slope, ascending.
    std::vector<std::pair<Rat, size_t>> slopes;  // (slope, cycle index)
    for (size_t i = 0; i < datum.cycles().size(); ++i)
        slopes.emplace_back(slope_of(datum, datum.cycles()[i][0]), i);
    std::sort(slopes.begin(), slopes.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<SlopeBlock> blocks;
    for (const auto& [slope, ci] : slopes) {
        if (blocks.empty() || blocks.back().slope != slope)
            blocks.push_back(SlopeBlock{slope, {}});
        std::vector<size_t> support = datum.cycles()[ci];
        std::sort(support.begin(), support.end());
        for (size_t s : support) {
            RatVec e(r, Rat(0));
            e[s - 1] = 1;
            blocks.back().basis.push_back(std::move(e));
        }
    }
    return FIsocrystal(p, std::move(a), std::move(blocks));
}

std::vector<CycleHeights> perm_manin_heights(const PermutationDatum& datum) {
    std::vector<CycleHeights> out;
    for (const CycleStats& st : cycle_stats(datum)) {
        CycleHeights h;
        // beta is periodic with shift d2 over r2, so n <= r2/r1 is exact.
        const auto beta_at = [&](long q) {
            // extend the stored window by periodicity
            const long period = st.r2;
            const long shift = (q - 1) / period;
            const long q0 = q - shift * period;
            return st.beta[static_cast<size_t>(q0 - 1)] + shift * st.d2;
        };
        for (long n = 1; n <= st.r2 / st.r1; ++n)
            h.u = std::max(h.u, beta_at(st.r1 * n) - st.d1 * n);
        const long r = static_cast<long>(st.r_i), d = static_cast<long>(st.d_i);
        for (long n = 1; n <= std::max(1L, st.r2 / r); ++n)
            h.v = std::max(h.v, beta_at(r * n) - d * n);
        out.push_back(h);
    }
    return out;
}

}  // namespace pdiv
