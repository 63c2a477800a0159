#include "pdiv/levelmod.hpp"

#include <algorithm>
#include <stdexcept>

namespace pdiv {

RatVec vectorize(const RatMat& x) {
    RatVec v(x.rows() * x.cols());
    for (size_t i = 0; i < x.rows(); ++i)
        for (size_t j = 0; j < x.cols(); ++j) v[i * x.cols() + j] = x.at(i, j);
    return v;
}

RatMat unvectorize(const RatVec& v, size_t rows, size_t cols) {
    RatMat x(rows, cols);
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) x.at(i, j) = v[i * cols + j];
    return x;
}

namespace {

enum class Sign { plus, zero, minus };

struct EndSplit {
    size_t r = 0;
    RatMat pmat, pinv;        // columns of pmat are the block basis vectors
    RatMat atil, atil_inv;    // phi in the block basis (block diagonal)
    std::vector<size_t> block_of_col;
    std::vector<Rat> slope_of_col;
};

EndSplit make_end_split(const FIsocrystal& f) {
    EndSplit s;
    s.r = f.rank();
    const auto blocks = f.effective_splitting();
    s.pmat = RatMat(s.r, s.r);
    size_t off = 0;
    for (size_t b = 0; b < blocks.size(); ++b)
        for (const RatVec& v : blocks[b].basis) {
            for (size_t i = 0; i < s.r; ++i) s.pmat.at(i, off) = v[i];
            s.block_of_col.push_back(b);
            s.slope_of_col.push_back(blocks[b].slope);
            ++off;
        }
    s.pinv = inverse(s.pmat);
    s.atil = s.pinv * f.matrix() * s.pmat;
    s.atil_inv = inverse(s.atil);
    return s;
}

Sign sign_of(const Rat& a, const Rat& b) {
    if (a > b) return Sign::plus;
    if (a == b) return Sign::zero;
    return Sign::minus;
}

/* Positions (u, v) of the split End coordinates carrying the given sign:
 * an elementary map sending block-of-v into block-of-u has slope
 * slope(u) - slope(v). */
std::vector<std::pair<size_t, size_t>> positions(const EndSplit& s, Sign sigma) {
    std::vector<std::pair<size_t, size_t>> pos;
    for (size_t u = 0; u < s.r; ++u)
        for (size_t v = 0; v < s.r; ++v)
            if (sign_of(s.slope_of_col[u], s.slope_of_col[v]) == sigma) pos.emplace_back(u, v);
    return pos;
}

/* Basis vector of the sign subspace in End coordinates:
 * vec(P E_{uv} P^{-1}) = vec(col_u(P) row_v(P^{-1})). */
RatVec embed_position(const EndSplit& s, size_t u, size_t v) {
    RatVec w(s.r * s.r, Rat(0));
    for (size_t i = 0; i < s.r; ++i) {
        if (s.pmat.at(i, u) == 0) continue;
        for (size_t j = 0; j < s.r; ++j) {
            if (s.pinv.at(v, j) == 0) continue;
            w[i * s.r + j] = s.pmat.at(i, u) * s.pinv.at(v, j);
        }
    }
    return w;
}

/* phi_End restricted to a sign subspace, in position coordinates:
 * E_{uv} -> Atil E_{uv} Atil^{-1} has (w,z)-coordinate
 * Atil[w][u] * Atil^{-1}[v][z]. */
RatMat restricted_end_map(const EndSplit& s, const std::vector<std::pair<size_t, size_t>>& pos,
                          bool invert) {
    const RatMat& m = invert ? s.atil_inv : s.atil;
    const RatMat& minv = invert ? s.atil : s.atil_inv;
    RatMat r(pos.size(), pos.size());
    for (size_t col = 0; col < pos.size(); ++col) {
        const auto [u, v] = pos[col];
        for (size_t row = 0; row < pos.size(); ++row) {
            const auto [w, z] = pos[row];
            if (m.at(w, u) == 0 || minv.at(v, z) == 0) continue;
            r.at(row, col) = m.at(w, u) * minv.at(v, z);
        }
    }
    return r;
}

/* End(M) intersected with the sign subspace, in position coordinates. */
EchelonLattice end_cap_subspace(const FIsocrystal& f, const EndSplit& s,
                                const std::vector<std::pair<size_t, size_t>>& pos) {
    const size_t big = s.r * s.r;
    std::vector<RatVec> span;
    span.reserve(pos.size());
    for (const auto& [u, v] : pos) span.push_back(embed_position(s, u, v));
    const EchelonLattice sat = saturate_span(f.prime(), big, span);
    // Position coordinates of X are the entries of P^{-1} X P.
    std::vector<RatVec> coords;
    coords.reserve(sat.rank());
    for (const RatVec& x : sat.basis()) {
        const RatMat y = s.pinv * unvectorize(x, s.r, s.r) * s.pmat;
        RatVec c(pos.size());
        for (size_t k = 0; k < pos.size(); ++k) c[k] = y.at(pos[k].first, pos[k].second);
        coords.push_back(std::move(c));
    }
    return hnf_basis(f.prime(), pos.size(), coords);
}

EchelonLattice embed_back(const FIsocrystal& f, const EndSplit& s,
                          const std::vector<std::pair<size_t, size_t>>& pos,
                          const EchelonLattice& in_coords) {
    const size_t big = s.r * s.r;
    std::vector<RatVec> gens;
    gens.reserve(in_coords.rank());
    for (const RatVec& y : in_coords.basis()) {
        RatVec x(big, Rat(0));
        for (size_t k = 0; k < pos.size(); ++k) {
            if (y[k] == 0) continue;
            const RatVec w = embed_position(s, pos[k].first, pos[k].second);
            for (size_t j = 0; j < big; ++j)
                if (w[j] != 0) x[j] += y[k] * w[j];
        }
        gens.push_back(std::move(x));
    }
    return hnf_basis(f.prime(), big, gens);
}

/* Two-sided stabilized chain for the slope-zero part. */
EchelonLattice stabilized_two_sided(const EchelonLattice& start, const RatMat& t,
                                    const RatMat& tinv) {
    EchelonLattice n = start;
    for (long iter = 0; iter < 100000; ++iter) {
        EchelonLattice next = meet(meet(n, apply_map(t, n)), apply_map(tinv, n));
        if (next == n) return n;
        n = std::move(next);
    }
    throw std::logic_error("two-sided chain: no stabilization");
}

}  // namespace

LevelModule level_module(const FIsocrystal& f) {
    if (!f.has_effective_splitting())
        throw std::invalid_argument("level_module: crystal carries no verified splitting");
    if (f.rank() == 0) throw std::invalid_argument("level_module: empty crystal");
    const EndSplit s = make_end_split(f);
    const size_t big = f.rank() * f.rank();

    const auto compute = [&](Sign sigma) -> EchelonLattice {
        const auto pos = positions(s, sigma);
        if (pos.empty()) return EchelonLattice::zero(f.prime(), big);
        const EchelonLattice start = end_cap_subspace(f, s, pos);
        EchelonLattice stable(EchelonLattice::zero(f.prime(), 1));
        switch (sigma) {
            case Sign::plus:
                // forward iterates stay integral: intersect with phi^{-1} images
                stable = stabilized_meet_chain(start, restricted_end_map(s, pos, true));
                break;
            case Sign::minus:
                stable = stabilized_meet_chain(start, restricted_end_map(s, pos, false));
                break;
            case Sign::zero:
                stable = stabilized_two_sided(start, restricted_end_map(s, pos, false),
                                              restricted_end_map(s, pos, true));
                break;
        }
        return embed_back(f, s, pos, stable);
    };

    EchelonLattice op = compute(Sign::plus);
    EchelonLattice oz = compute(Sign::zero);
    EchelonLattice om = compute(Sign::minus);
    EchelonLattice o = join(join(op, oz), om);
    return LevelModule(std::move(op), std::move(oz), std::move(om), std::move(o));
}

namespace {

bool any_unit_entry(const EchelonLattice& l, const Int& p) {
    for (const RatVec& v : l.basis())
        for (const Rat& e : v)
            if (e != 0 && val_p(e, p) == PVal::of(0)) return true;
    return false;
}

}  // namespace

TorsionReport level_torsion(const FIsocrystal& f, bool with_pair_torsions) {
    const LevelModule lm = level_module(f);
    const EchelonLattice e = EchelonLattice::standard(f.prime(), f.rank() * f.rank());
    TorsionReport rep;
    if (lm.o == e) {
        // Rule (a) candidate. End(M) mod p is a simple algebra, so the
        // two-sided ideal generated by O_+ + O_- is topologically
        // nilpotent exactly when every generator falls into p End(M).
        const bool not_nilpotent =
            any_unit_entry(lm.o_plus, f.prime()) || any_unit_entry(lm.o_minus, f.prime());
        if (not_nilpotent) {
            rep.ell = 1;
            rep.epsilon = 1;
            rep.rule = 'a';
            const HodgeNewtonProfile prof = classify(f);
            rep.rule_a_beyond_ordinary = !(prof.dieudonne && prof.ordinary);
        } else {
            rep.ell = 0;
            rep.epsilon = 0;
            rep.rule = 'b';
        }
    } else {
        rep.ell = min_power(e, lm.o);
        rep.epsilon = 0;
        rep.rule = 'b';
    }
    if (with_pair_torsions && f.has_effective_splitting()) {
        const auto blocks = f.effective_splitting();
        if (blocks.size() >= 2 && lattice_splits_along_blocks(f)) {
            std::vector<FIsocrystal> subs;
            for (size_t i = 0; i < blocks.size(); ++i) subs.push_back(block_crystal(f, i));
            rep.pair_torsions.assign(blocks.size(), std::vector<long>(blocks.size(), 0));
            for (size_t i = 0; i < blocks.size(); ++i)
                for (size_t j = 0; j < blocks.size(); ++j)
                    rep.pair_torsions[i][j] = pair_level_torsion(subs[i], subs[j]);
            rep.has_pair_torsions = true;
        }
    }
    return rep;
}

long pair_level_torsion(const FIsocrystal& f1, const FIsocrystal& f2) {
    if (f1.prime() != f2.prime()) throw std::invalid_argument("pair_level_torsion: prime mismatch");
    if (!f1.isoclinic() || !f2.isoclinic())
        throw std::invalid_argument("pair_level_torsion: inputs must be isoclinic");
    const Rat a1 = f1.newton_slopes()[0], a2 = f2.newton_slopes()[0];
    const FIsocrystal h = hom_crystal(f1, f2);
    const EchelonLattice std_l = h.std_lattice();
    const RatMat t = a1 <= a2 ? inverse(h.matrix()) : h.matrix();
    return min_power(std_l, stabilized_meet_chain(std_l, t));
}

namespace {

/* F_p row vectors with Gaussian elimination, for the nilpotence check. */
struct ModPSpace {
    Int p;
    size_t dim;
    std::vector<std::vector<Int>> rows;  // reduced echelon rows
    std::vector<size_t> pivots;

    bool add(std::vector<Int> v) {  // returns true if the span grew
        for (size_t k = 0; k < rows.size(); ++k) {
            if (v[pivots[k]] == 0) continue;
            const Int f = v[pivots[k]];
            for (size_t j = 0; j < dim; ++j) v[j] = ((v[j] - f * rows[k][j]) % p + p) % p;
        }
        size_t c = dim;
        for (size_t j = 0; j < dim; ++j)
            if (v[j] != 0) {
                c = j;
                break;
            }
        if (c == dim) return false;
        Int inv;
        mpz_invert(inv.backend().data(), v[c].backend().data(), p.backend().data());
        for (size_t j = 0; j < dim; ++j) v[j] = (v[j] * inv) % p;
        rows.push_back(std::move(v));
        pivots.push_back(c);
        return true;
    }

    size_t rank() const { return rows.size(); }
};

std::vector<Int> mat_mod_p(const RatMat& x, const Int& p) {
    std::vector<Int> v(x.rows() * x.cols());
    for (size_t i = 0; i < x.rows(); ++i)
        for (size_t j = 0; j < x.cols(); ++j) {
            const Rat& e = x.at(i, j);
            if (e == 0) {
                v[i * x.cols() + j] = 0;
                continue;
            }
            if (val_p(e, p) < PVal::of(0))
                throw std::invalid_argument("mat_mod_p: entry not p-integral");
            Int num = numerator(e) % p, den = denominator(e) % p, inv;
            num = (num + p) % p;
            den = (den + p) % p;
            mpz_invert(inv.backend().data(), den.backend().data(), p.backend().data());
            v[i * x.cols() + j] = (num * inv) % p;
        }
    return v;
}

std::vector<Int> mod_product(const std::vector<Int>& a, const std::vector<Int>& b, size_t n,
                             const Int& p) {
    std::vector<Int> c(n * n, Int(0));
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k) {
            if (a[i * n + k] == 0) continue;
            for (size_t j = 0; j < n; ++j) {
                if (b[k * n + j] == 0) continue;
                c[i * n + j] = (c[i * n + j] + a[i * n + k] * b[k * n + j]) % p;
            }
        }
    return c;
}

/* Nilpotence of the two-sided ideal of g/pg generated by the given
 * matrices: close under multiplication by the algebra basis, then drive
 * the ideal powers down. */
bool ideal_topologically_nilpotent(const std::vector<std::vector<Int>>& algebra_basis,
                                   const std::vector<std::vector<Int>>& generators, size_t n,
                                   const Int& p) {
    const size_t dim = n * n;
    ModPSpace ideal{p, dim, {}, {}};
    std::vector<std::vector<Int>> frontier;
    for (const auto& g : generators)
        if (ideal.add(g)) frontier.push_back(g);
    while (!frontier.empty()) {
        std::vector<std::vector<Int>> next;
        for (const auto& x : frontier)
            for (const auto& e : algebra_basis) {
                for (auto prod : {mod_product(e, x, n, p), mod_product(x, e, n, p)})
                    if (ideal.add(prod)) next.push_back(std::move(prod));
            }
        frontier = std::move(next);
    }
    if (ideal.rank() == 0) return true;
    // Powers of the ideal form a descending chain; nilpotent iff it hits 0.
    std::vector<std::vector<Int>> power = ideal.rows;
    const std::vector<std::vector<Int>> base = ideal.rows;
    for (size_t iter = 0; iter <= dim + 1; ++iter) {
        ModPSpace nextspace{p, dim, {}, {}};
        for (const auto& a : power)
            for (const auto& b : base) nextspace.add(mod_product(a, b, n, p));
        if (nextspace.rank() == 0) return true;
        if (nextspace.rank() == power.size()) return false;  // stabilized non-zero
        power = nextspace.rows;
    }
    return false;
}

}  // namespace

TorsionReport subalgebra_level_torsion(const FIsocrystal& f, const std::vector<RatMat>& g_basis) {
    const size_t r = f.rank(), big = r * r;
    if (g_basis.empty()) throw std::invalid_argument("subalgebra: empty basis");
    std::vector<RatVec> gvecs;
    for (const RatMat& x : g_basis) {
        if (x.rows() != r || x.cols() != r) throw std::invalid_argument("subalgebra: shape mismatch");
        gvecs.push_back(vectorize(x));
    }
    const EchelonLattice g = hnf_basis(f.prime(), big, gvecs);
    if (g.rank() != g_basis.size())
        throw std::invalid_argument("subalgebra: generators are dependent");
    if (!g.contains(vectorize(RatMat::identity(r))))
        throw std::invalid_argument("subalgebra: 1_M not in g");
    for (const RatMat& x : g_basis)
        for (const RatMat& y : g_basis)
            if (!g.contains(vectorize(x * y)))
                throw std::invalid_argument("subalgebra: g not closed under multiplication");
    if (!(saturate_span(f.prime(), big, gvecs) == g))
        throw std::invalid_argument("subalgebra: g is not a direct summand of End(M)");

    // Slope gradedness: each sign component of each basis element stays in g.
    const EndSplit s = make_end_split(f);
    for (const RatMat& x : g_basis) {
        const RatMat y = s.pinv * x * s.pmat;
        for (Sign sigma : {Sign::plus, Sign::zero, Sign::minus}) {
            RatMat part(r, r);
            for (size_t u = 0; u < r; ++u)
                for (size_t v = 0; v < r; ++v)
                    if (sign_of(s.slope_of_col[u], s.slope_of_col[v]) == sigma)
                        part.at(u, v) = y.at(u, v);
            if (!g.contains(vectorize(s.pmat * part * s.pinv)))
                throw std::invalid_argument("subalgebra: g is not slope-graded");
        }
    }

    const LevelModule lm = level_module(f);
    const EchelonLattice g_plus = meet(g, lm.o_plus);
    const EchelonLattice g_zero = meet(g, lm.o_zero);
    const EchelonLattice g_minus = meet(g, lm.o_minus);
    const EchelonLattice og = join(join(g_plus, g_zero), g_minus);

    TorsionReport rep;
    if (og == g) {
        std::vector<std::vector<Int>> algebra_basis, generators;
        for (const RatVec& v : g.basis())
            algebra_basis.push_back(mat_mod_p(unvectorize(v, r, r), f.prime()));
        for (const EchelonLattice* part : {&g_plus, &g_minus})
            for (const RatVec& v : part->basis())
                generators.push_back(mat_mod_p(unvectorize(v, r, r), f.prime()));
        if (!ideal_topologically_nilpotent(algebra_basis, generators, r, f.prime())) {
            rep.ell = 1;
            rep.epsilon = 1;
            rep.rule = 'a';
            return rep;
        }
    }
    rep.ell = min_power(g, og);
    rep.epsilon = 0;
    rep.rule = 'b';
    return rep;
}

}  // namespace pdiv
