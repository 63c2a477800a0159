#include "pdiv/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace pdiv {

namespace {

/* In-place canonical echelon reduction over Z_(p). Row operations are
 * restricted to GL(Z_(p)): swaps, unit scalings, and shears by p-integral
 * multipliers, so the row span is preserved exactly. */
void echelonize(const Int& p, std::vector<RatVec>& rows, size_t ambient,
                std::vector<size_t>& pivot_cols, std::vector<long>& pivot_vals) {
    pivot_cols.clear();
    pivot_vals.clear();
    size_t rank = 0;
    for (size_t col = 0; col < ambient && rank < rows.size(); ++col) {
        // Pivot of minimal p-valuation; it divides every entry below it.
        size_t best = rows.size();
        PVal best_val = PVal::inf();
        for (size_t i = rank; i < rows.size(); ++i) {
            if (rows[i][col] == 0) continue;
            PVal v = val_p(rows[i][col], p);
            if (v < best_val) {
                best_val = v;
                best = i;
            }
        }
        if (best == rows.size()) continue;
        std::swap(rows[best], rows[rank]);
        const long pv = best_val.v;
        const Rat unit_inv = pow_p(p, pv) / rows[rank][col];
        if (unit_inv != 1)
            for (Rat& e : rows[rank])
                if (e != 0) e *= unit_inv;
        for (size_t i = rank + 1; i < rows.size(); ++i) {
            if (rows[i][col] == 0) continue;
            const Rat f = rows[i][col] / rows[rank][col];
            for (size_t j = col; j < ambient; ++j)
                if (rows[rank][j] != 0) rows[i][j] -= f * rows[rank][j];
        }
        pivot_cols.push_back(col);
        pivot_vals.push_back(pv);
        ++rank;
    }
    rows.resize(rank);
    // Reduce entries above each pivot into the fundamental domain.
    for (size_t k = 0; k < rank; ++k) {
        const size_t c = pivot_cols[k];
        const long pv = pivot_vals[k];
        for (size_t i = 0; i < k; ++i) {
            const Rat& x = rows[i][c];
            if (x == 0) continue;
            const Rat w = canon_rep(x, p, pv);
            if (w == x) continue;
            const Rat f = (x - w) / pow_p(p, pv);
            for (size_t j = c; j < ambient; ++j)
                if (rows[k][j] != 0) rows[i][j] -= f * rows[k][j];
        }
    }
}

bool monomial_rows(const std::vector<RatVec>& rows) {
    for (const RatVec& r : rows) {
        int nz = 0;
        for (const Rat& e : r)
            if (e != 0 && ++nz > 1) return false;
        if (nz != 1) return false;
    }
    return true;
}

}  // namespace

EchelonLattice hnf_basis(const Int& p, size_t ambient, const std::vector<RatVec>& generators) {
    if (ambient == 0) throw std::invalid_argument("hnf_basis: empty ambient dimension");
    if (p < 2 || !is_prime(p)) throw std::invalid_argument("hnf_basis: p must be prime");
    for (const RatVec& g : generators)
        if (g.size() != ambient) throw std::invalid_argument("hnf_basis: ambient mismatch");
    EchelonLattice l(p, ambient);
    l.basis_ = generators;
    echelonize(p, l.basis_, ambient, l.pivot_cols_, l.pivot_vals_);
    return l;
}

EchelonLattice EchelonLattice::standard(const Int& p, size_t ambient) {
    std::vector<RatVec> rows(ambient, RatVec(ambient, Rat(0)));
    for (size_t i = 0; i < ambient; ++i) rows[i][i] = 1;
    return hnf_basis(p, ambient, rows);
}

EchelonLattice EchelonLattice::zero(const Int& p, size_t ambient) {
    return hnf_basis(p, ambient, {});
}

bool EchelonLattice::is_monomial() const { return monomial_rows(basis_); }

bool EchelonLattice::contains(const RatVec& x) const {
    if (x.size() != ambient_) throw std::invalid_argument("contains: ambient mismatch");
    RatVec rem = x;
    for (size_t k = 0; k < basis_.size(); ++k) {
        const size_t c = pivot_cols_[k];
        if (rem[c] == 0) continue;
        const Rat f = rem[c] / basis_[k][c];
        if (val_p(f, p_) < PVal::of(0)) return false;
        for (size_t j = c; j < ambient_; ++j)
            if (basis_[k][j] != 0) rem[j] -= f * basis_[k][j];
    }
    for (const Rat& e : rem)
        if (e != 0) return false;
    return true;
}

bool EchelonLattice::contains(const EchelonLattice& other) const {
    if (other.ambient_ != ambient_) throw std::invalid_argument("contains: ambient mismatch");
    for (const RatVec& v : other.basis_)
        if (!contains(v)) return false;
    return true;
}

std::optional<RatVec> EchelonLattice::coords(const RatVec& x) const {
    if (x.size() != ambient_) throw std::invalid_argument("coords: ambient mismatch");
    RatVec rem = x;
    RatVec y(basis_.size(), Rat(0));
    for (size_t k = 0; k < basis_.size(); ++k) {
        const size_t c = pivot_cols_[k];
        if (rem[c] == 0) continue;
        y[k] = rem[c] / basis_[k][c];
        for (size_t j = c; j < ambient_; ++j)
            if (basis_[k][j] != 0) rem[j] -= y[k] * basis_[k][j];
    }
    for (const Rat& e : rem)
        if (e != 0) return std::nullopt;
    return y;
}

std::vector<RatVec> left_kernel_zp(const Int& p, const std::vector<RatVec>& m_rows, size_t ncols) {
    const size_t m = m_rows.size();
    std::vector<RatVec> w = m_rows;
    std::vector<RatVec> t(m, RatVec(m, Rat(0)));
    for (size_t i = 0; i < m; ++i) t[i][i] = 1;
    size_t rank = 0;
    for (size_t col = 0; col < ncols && rank < m; ++col) {
        size_t best = m;
        PVal best_val = PVal::inf();
        for (size_t i = rank; i < m; ++i) {
            if (w[i][col] == 0) continue;
            PVal v = val_p(w[i][col], p);
            if (v < best_val) {
                best_val = v;
                best = i;
            }
        }
        if (best == m) continue;
        std::swap(w[best], w[rank]);
        std::swap(t[best], t[rank]);
        for (size_t i = rank + 1; i < m; ++i) {
            if (w[i][col] == 0) continue;
            const Rat f = w[i][col] / w[rank][col];  // p-integral by pivot choice
            for (size_t j = col; j < ncols; ++j)
                if (w[rank][j] != 0) w[i][j] -= f * w[rank][j];
            for (size_t j = 0; j < m; ++j)
                if (t[rank][j] != 0) t[i][j] -= f * t[rank][j];
        }
        ++rank;
    }
    return std::vector<RatVec>(t.begin() + static_cast<long>(rank), t.end());
}

EchelonLattice meet(const EchelonLattice& l1, const EchelonLattice& l2) {
    if (l1.prime() != l2.prime()) throw std::invalid_argument("meet: prime mismatch");
    if (l1.ambient() != l2.ambient()) throw std::invalid_argument("meet: ambient mismatch");
    const Int& p = l1.prime();
    const size_t n = l1.ambient();
    if (l1.is_full_rank() && l2.is_full_rank() && l1.is_monomial() && l2.is_monomial()) {
        // Diagonal lattices intersect coordinate-wise.
        std::vector<RatVec> rows(n, RatVec(n, Rat(0)));
        for (size_t k = 0; k < n; ++k) {
            const size_t c1 = l1.pivot_cols()[k];
            long v2 = 0;
            for (size_t j = 0; j < n; ++j)
                if (l2.pivot_cols()[j] == c1) v2 = l2.pivot_vals()[j];
            rows[k][c1] = pow_p(p, std::max(l1.pivot_vals()[k], v2));
        }
        return hnf_basis(p, n, rows);
    }
    std::vector<RatVec> stacked = l1.basis();
    stacked.insert(stacked.end(), l2.basis().begin(), l2.basis().end());
    std::vector<RatVec> kernel = left_kernel_zp(p, stacked, n);
    std::vector<RatVec> gens;
    gens.reserve(kernel.size());
    for (const RatVec& k : kernel) {
        RatVec x(n, Rat(0));
        for (size_t i = 0; i < l1.rank(); ++i) {
            if (k[i] == 0) continue;
            for (size_t j = 0; j < n; ++j)
                if (l1.basis()[i][j] != 0) x[j] += k[i] * l1.basis()[i][j];
        }
        gens.push_back(std::move(x));
    }
    return hnf_basis(p, n, gens);
}

EchelonLattice join(const EchelonLattice& l1, const EchelonLattice& l2) {
    if (l1.prime() != l2.prime()) throw std::invalid_argument("join: prime mismatch");
    if (l1.ambient() != l2.ambient()) throw std::invalid_argument("join: ambient mismatch");
    std::vector<RatVec> gens = l1.basis();
    gens.insert(gens.end(), l2.basis().begin(), l2.basis().end());
    return hnf_basis(l1.prime(), l1.ambient(), gens);
}

EchelonLattice apply_map(const RatMat& t, const EchelonLattice& l) {
    if (t.rows() != l.ambient() || t.cols() != l.ambient())
        throw std::invalid_argument("apply_map: shape mismatch");
    if (determinant(t) == 0) throw std::invalid_argument("apply_map: singular map");
    std::vector<RatVec> gens;
    gens.reserve(l.rank());
    for (const RatVec& v : l.basis()) gens.push_back(mat_vec(t, v));
    return hnf_basis(l.prime(), l.ambient(), gens);
}

EchelonLattice scale_lattice(const EchelonLattice& l, long p_exponent) {
    const Rat s = pow_p(l.prime(), p_exponent);
    std::vector<RatVec> gens;
    gens.reserve(l.rank());
    for (const RatVec& v : l.basis()) {
        RatVec w(v.size());
        for (size_t j = 0; j < v.size(); ++j) w[j] = s * v[j];
        gens.push_back(std::move(w));
    }
    return hnf_basis(l.prime(), l.ambient(), gens);
}

namespace {

/* Valuations of the local Smith form of a rational matrix: global
 * minimal-valuation pivoting makes every elimination multiplier
 * p-integral, so one sweep per pivot suffices over Z_(p). */
std::vector<long> local_smith_valuations(const Int& p, std::vector<RatVec> w) {
    std::vector<long> divisors;
    const size_t m = w.size();
    if (m == 0) return divisors;
    const size_t n = w[0].size();
    for (size_t k = 0; k < std::min(m, n); ++k) {
        size_t bi = m, bj = n;
        PVal best = PVal::inf();
        for (size_t i = k; i < m; ++i)
            for (size_t j = k; j < n; ++j) {
                if (w[i][j] == 0) continue;
                PVal v = val_p(w[i][j], p);
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        if (bi == m) break;
        std::swap(w[bi], w[k]);
        for (size_t i = k; i < m; ++i) std::swap(w[i][bj], w[i][k]);
        for (size_t i = k + 1; i < m; ++i) {
            if (w[i][k] == 0) continue;
            const Rat f = w[i][k] / w[k][k];
            for (size_t j = k; j < n; ++j)
                if (w[k][j] != 0) w[i][j] -= f * w[k][j];
        }
        for (size_t j = k + 1; j < n; ++j) {
            if (w[k][j] == 0) continue;
            const Rat f = w[k][j] / w[k][k];
            for (size_t i = k; i < m; ++i)
                if (w[i][k] != 0) w[i][j] -= f * w[i][k];
        }
        divisors.push_back(best.v);
    }
    std::sort(divisors.begin(), divisors.end());
    return divisors;
}

}  // namespace

std::vector<long> rel_divisors(const EchelonLattice& l1, const EchelonLattice& l2) {
    if (l1.prime() != l2.prime()) throw std::invalid_argument("rel_divisors: prime mismatch");
    if (l1.ambient() != l2.ambient()) throw std::invalid_argument("rel_divisors: ambient mismatch");
    if (l1.rank() != l2.rank()) throw std::invalid_argument("rel_divisors: span mismatch");
    if (l1.is_monomial() && l2.is_monomial() && l1.pivot_cols() == l2.pivot_cols()) {
        std::vector<long> d(l1.rank());
        for (size_t k = 0; k < l1.rank(); ++k) d[k] = l2.pivot_vals()[k] - l1.pivot_vals()[k];
        std::sort(d.begin(), d.end());
        return d;
    }
    // Coordinates of l2's basis in l1's basis, then a local Smith form.
    std::vector<RatVec> c;
    c.reserve(l2.rank());
    for (const RatVec& v : l2.basis()) {
        auto y = l1.coords(v);
        if (!y) throw std::invalid_argument("rel_divisors: span mismatch");
        c.push_back(std::move(*y));
    }
    return local_smith_valuations(l1.prime(), std::move(c));
}

long min_power(const EchelonLattice& l1, const EchelonLattice& l2) {
    if (l1.prime() != l2.prime()) throw std::invalid_argument("min_power: prime mismatch");
    if (l1.ambient() != l2.ambient()) throw std::invalid_argument("min_power: ambient mismatch");
    long worst = 0;  // = -min valuation over all coordinates
    for (const RatVec& v : l1.basis()) {
        auto y = l2.coords(v);
        if (!y) throw std::invalid_argument("min_power: span of l1 not inside span of l2");
        for (const Rat& e : *y) {
            if (e == 0) continue;
            worst = std::max(worst, -val_p(e, l2.prime()).v);
        }
    }
    return worst;
}

EchelonLattice stabilized_meet_chain(const EchelonLattice& start, const RatMat& t) {
    EchelonLattice n = start;
    for (long iter = 0; iter < 100000; ++iter) {
        EchelonLattice next = meet(n, apply_map(t, n));
        if (next == n) return n;
        n = std::move(next);
    }
    throw std::logic_error("stabilized_meet_chain: no stabilization");
}

EchelonLattice saturate_span(const Int& p, size_t ambient, const std::vector<RatVec>& span_vectors) {
    // x in span(K) iff x is orthogonal to the rational nullspace of K.
    RatMat k(span_vectors.size(), ambient);
    for (size_t i = 0; i < span_vectors.size(); ++i)
        for (size_t j = 0; j < ambient; ++j) k.at(i, j) = span_vectors[i][j];
    std::vector<RatVec> functionals = nullspace(k);
    if (functionals.empty()) return EchelonLattice::standard(p, ambient);
    std::vector<RatVec> g(ambient, RatVec(functionals.size(), Rat(0)));
    for (size_t i = 0; i < ambient; ++i)
        for (size_t j = 0; j < functionals.size(); ++j) g[i][j] = functionals[j][i];
    std::vector<RatVec> kernel = left_kernel_zp(p, g, functionals.size());
    return hnf_basis(p, ambient, kernel);
}

}  // namespace pdiv
