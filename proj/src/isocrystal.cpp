#include "pdiv/isocrystal.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pdiv {

std::vector<Rat> newton_slopes_of_poly(const std::vector<Rat>& coeffs, const Int& p) {
    const size_t n = coeffs.size() - 1;
    if (coeffs[n] != 1) throw std::invalid_argument("newton_slopes: polynomial not monic");
    if (n > 0 && coeffs[0] == 0) throw std::invalid_argument("newton_slopes: zero constant term");
    struct Pt {
        long i;
        long v;
    };
    std::vector<Pt> pts;
    for (size_t i = 0; i <= n; ++i) {
        if (coeffs[i] == 0) continue;
        pts.push_back({static_cast<long>(i), val_p(coeffs[i], p).v});
    }
    // Lower convex hull, left to right.
    std::vector<Pt> hull;
    for (const Pt& q : pts) {
        while (hull.size() >= 2) {
            const Pt& a = hull[hull.size() - 2];
            const Pt& b = hull.back();
            // Pop b when it lies on or above segment a -> q.
            if (Rat(b.v - a.v) * Rat(q.i - a.i) >= Rat(q.v - a.v) * Rat(b.i - a.i))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(q);
    }
    std::vector<Rat> slopes;
    slopes.reserve(n);
    for (size_t k = 1; k < hull.size(); ++k) {
        const Rat m = Rat(hull[k].v - hull[k - 1].v, hull[k].i - hull[k - 1].i);
        for (long t = 0; t < hull[k].i - hull[k - 1].i; ++t) slopes.push_back(-m);
    }
    std::sort(slopes.begin(), slopes.end());
    return slopes;
}

namespace {

std::vector<long> divisor_valuations(const Int& p, const RatMat& a) {
    const EchelonLattice std_l = EchelonLattice::standard(p, a.rows());
    return rel_divisors(std_l, apply_map(a, std_l));
}

/* Matrix of phi restricted to the span of `basis` (which must be
 * phi-stable), written in that basis; column j holds the coordinates of
 * phi(basis[j]). */
RatMat restricted_matrix(const RatMat& a, const std::vector<RatVec>& basis) {
    const size_t t = basis.size();
    RatMat r(t, t);
    for (size_t j = 0; j < t; ++j) {
        auto y = solve_in_rowspan(basis, mat_vec(a, basis[j]));
        if (!y) throw std::invalid_argument("splitting block is not phi-stable");
        for (size_t i = 0; i < t; ++i) r.at(i, j) = (*y)[i];
    }
    return r;
}

}  // namespace

FIsocrystal::FIsocrystal(Int p, RatMat a, std::optional<std::vector<SlopeBlock>> splitting)
    : p_(std::move(p)), rank_(a.rows()), a_(std::move(a)), splitting_(std::move(splitting)) {
    if (p_ < 2 || !is_prime(p_)) throw std::invalid_argument("isocrystal: p must be prime");
    if (a_.rows() != a_.cols()) throw std::invalid_argument("isocrystal: matrix not square");
    if (rank_ > 0 && determinant(a_) == 0) throw std::domain_error("isocrystal: singular matrix");

    if (rank_ > 0) {
        slopes_ = newton_slopes_of_poly(charpoly(a_), p_);
        auto div = divisor_valuations(p_, a_);
        dieudonne_ = std::all_of(div.begin(), div.end(), [](long v) { return v == 0 || v == 1; });
    } else {
        dieudonne_ = true;
    }

    if (!splitting_) return;
    // Verify the declared splitting.
    size_t total = 0;
    std::vector<RatVec> all;
    for (size_t i = 0; i < splitting_->size(); ++i) {
        const SlopeBlock& blk = (*splitting_)[i];
        if (blk.basis.empty()) throw std::invalid_argument("splitting: empty block");
        if (i > 0 && !((*splitting_)[i - 1].slope < blk.slope))
            throw std::invalid_argument("splitting: slopes must be strictly increasing");
        for (const RatVec& v : blk.basis) {
            if (v.size() != rank_) throw std::invalid_argument("splitting: ambient mismatch");
            all.push_back(v);
        }
        total += blk.basis.size();
        const RatMat restr = restricted_matrix(a_, blk.basis);
        const std::vector<Rat> blk_slopes = newton_slopes_of_poly(charpoly(restr), p_);
        for (const Rat& s : blk_slopes)
            if (s != blk.slope)
                throw std::invalid_argument("splitting: block not isoclinic of the declared slope");
    }
    if (total != rank_) throw std::invalid_argument("splitting: blocks do not span");
    RatMat pmat(rank_, rank_);
    for (size_t j = 0; j < total; ++j)
        for (size_t i = 0; i < rank_; ++i) pmat.at(i, j) = all[j][i];
    if (determinant(pmat) == 0) throw std::invalid_argument("splitting: blocks not independent");
}

bool FIsocrystal::isoclinic() const {
    if (rank_ == 0) return true;
    return std::all_of(slopes_.begin(), slopes_.end(), [&](const Rat& s) { return s == slopes_[0]; });
}

std::vector<SlopeBlock> FIsocrystal::effective_splitting() const {
    if (splitting_) return *splitting_;
    if (!isoclinic()) throw std::invalid_argument("crystal has no verified splitting");
    SlopeBlock blk;
    blk.slope = rank_ == 0 ? Rat(0) : slopes_[0];
    blk.basis.assign(rank_, RatVec(rank_, Rat(0)));
    for (size_t i = 0; i < rank_; ++i) blk.basis[i][i] = 1;
    return {std::move(blk)};
}

bool FIsocrystal::has_effective_splitting() const { return splitting_.has_value() || isoclinic(); }

HodgeNewtonProfile classify(const FIsocrystal& f) {
    HodgeNewtonProfile prof;
    prof.slopes = f.newton_slopes();
    prof.dieudonne = f.dieudonne();
    prof.isoclinic = f.isoclinic();
    if (f.rank() == 0) {
        prof.ordinary = true;
        return prof;
    }
    const auto div = divisor_valuations(f.prime(), f.matrix());
    prof.d = static_cast<size_t>(std::count_if(div.begin(), div.end(), [](long v) { return v >= 1; }));
    prof.c = f.rank() - prof.d;
    std::vector<Rat> ord(prof.c, Rat(0));
    ord.insert(ord.end(), prof.d, Rat(1));
    prof.ordinary = (prof.slopes == ord);
    return prof;
}

AlphaBetaDelta alpha_beta_delta(const FIsocrystal& f, long q) {
    if (q < 1) throw std::invalid_argument("alpha_beta_delta: q must be positive");
    const auto div = divisor_valuations(f.prime(), mat_pow(f.matrix(), q));
    AlphaBetaDelta r;
    r.alpha = div.front();
    r.beta = div.back();
    r.delta = r.beta - r.alpha;
    return r;
}

FIsocrystal dual(const FIsocrystal& f) {
    if (!f.dieudonne()) throw std::invalid_argument("dual: input is not a Dieudonne module");
    const size_t n = f.rank();
    RatMat m = Rat(f.prime()) * inverse(f.matrix().transpose());
    std::optional<std::vector<SlopeBlock>> split;
    if (f.splitting()) {
        // Dual blocks: annihilators of the complementary blocks, i.e. the
        // matching rows of P^{-1}; slopes become 1 - alpha.
        RatMat pmat(n, n);
        size_t off = 0;
        for (const SlopeBlock& blk : *f.splitting())
            for (const RatVec& v : blk.basis) {
                for (size_t i = 0; i < n; ++i) pmat.at(i, off) = v[i];
                ++off;
            }
        const RatMat pinv = inverse(pmat);
        std::vector<SlopeBlock> blocks;
        off = 0;
        for (const SlopeBlock& blk : *f.splitting()) {
            SlopeBlock nb;
            nb.slope = Rat(1) - blk.slope;
            for (size_t k = 0; k < blk.basis.size(); ++k) nb.basis.push_back(pinv.row(off + k));
            off += blk.basis.size();
            blocks.push_back(std::move(nb));
        }
        std::sort(blocks.begin(), blocks.end(),
                  [](const SlopeBlock& a, const SlopeBlock& b) { return a.slope < b.slope; });
        split = std::move(blocks);
    }
    return FIsocrystal(f.prime(), std::move(m), std::move(split));
}

namespace {

std::optional<std::vector<SlopeBlock>> splitting_or_trivial(const FIsocrystal& f) {
    if (f.has_effective_splitting() && f.rank() > 0) return f.effective_splitting();
    return std::nullopt;
}

std::vector<SlopeBlock> merge_equal_slopes(std::vector<SlopeBlock> blocks) {
    std::sort(blocks.begin(), blocks.end(),
              [](const SlopeBlock& a, const SlopeBlock& b) { return a.slope < b.slope; });
    std::vector<SlopeBlock> merged;
    for (SlopeBlock& b : blocks) {
        if (!merged.empty() && merged.back().slope == b.slope)
            merged.back().basis.insert(merged.back().basis.end(), b.basis.begin(), b.basis.end());
        else
            merged.push_back(std::move(b));
    }
    return merged;
}

}  // namespace

FIsocrystal direct_sum(const FIsocrystal& f1, const FIsocrystal& f2) {
    if (f1.prime() != f2.prime()) throw std::invalid_argument("direct_sum: prime mismatch");
    const size_t n1 = f1.rank(), n2 = f2.rank(), n = n1 + n2;
    RatMat a(n, n);
    for (size_t i = 0; i < n1; ++i)
        for (size_t j = 0; j < n1; ++j) a.at(i, j) = f1.matrix().at(i, j);
    for (size_t i = 0; i < n2; ++i)
        for (size_t j = 0; j < n2; ++j) a.at(n1 + i, n1 + j) = f2.matrix().at(i, j);
    if (n2 == 0) return FIsocrystal(f1.prime(), std::move(a), splitting_or_trivial(f1));
    if (n1 == 0) return FIsocrystal(f2.prime(), std::move(a), splitting_or_trivial(f2));

    std::optional<std::vector<SlopeBlock>> split;
    auto s1 = splitting_or_trivial(f1);
    auto s2 = splitting_or_trivial(f2);
    if (s1 && s2) {
        std::vector<SlopeBlock> blocks;
        for (const SlopeBlock& b : *s1) {
            SlopeBlock nb{b.slope, {}};
            for (const RatVec& v : b.basis) {
                RatVec w(n, Rat(0));
                std::copy(v.begin(), v.end(), w.begin());
                nb.basis.push_back(std::move(w));
            }
            blocks.push_back(std::move(nb));
        }
        for (const SlopeBlock& b : *s2) {
            SlopeBlock nb{b.slope, {}};
            for (const RatVec& v : b.basis) {
                RatVec w(n, Rat(0));
                std::copy(v.begin(), v.end(), w.begin() + static_cast<long>(n1));
                nb.basis.push_back(std::move(w));
            }
            blocks.push_back(std::move(nb));
        }
        split = merge_equal_slopes(std::move(blocks));
    }
    return FIsocrystal(f1.prime(), std::move(a), std::move(split));
}

FIsocrystal hom_crystal(const FIsocrystal& f1, const FIsocrystal& f2) {
    if (f1.prime() != f2.prime()) throw std::invalid_argument("hom_crystal: prime mismatch");
    const size_t r1 = f1.rank(), r2 = f2.rank(), n = r1 * r2;
    const RatMat a1inv = r1 > 0 ? inverse(f1.matrix()) : RatMat(0, 0);
    const auto idx = [r1](size_t row, size_t col) { return row * r1 + col; };
    // X -> A2 X A1^{-1} on r2 x r1 matrices.
    RatMat k(n, n);
    for (size_t i = 0; i < r2; ++i)
        for (size_t a = 0; a < r2; ++a) {
            if (f2.matrix().at(i, a) == 0) continue;
            for (size_t b = 0; b < r1; ++b)
                for (size_t j = 0; j < r1; ++j) {
                    if (a1inv.at(b, j) == 0) continue;
                    k.at(idx(i, j), idx(a, b)) = f2.matrix().at(i, a) * a1inv.at(b, j);
                }
        }
    std::optional<std::vector<SlopeBlock>> split;
    auto s1 = splitting_or_trivial(f1);
    auto s2 = splitting_or_trivial(f2);
    if (s1 && s2 && n > 0) {
        RatMat p1(r1, r1), p2(r2, r2);
        size_t off = 0;
        for (const SlopeBlock& b : *s1)
            for (const RatVec& v : b.basis) {
                for (size_t i = 0; i < r1; ++i) p1.at(i, off) = v[i];
                ++off;
            }
        off = 0;
        for (const SlopeBlock& b : *s2)
            for (const RatVec& v : b.basis) {
                for (size_t i = 0; i < r2; ++i) p2.at(i, off) = v[i];
                ++off;
            }
        const RatMat p1inv = inverse(p1);
        std::vector<SlopeBlock> blocks;
        size_t off1 = 0;
        for (const SlopeBlock& b1 : *s1) {
            size_t off2 = 0;
            for (const SlopeBlock& b2 : *s2) {
                SlopeBlock nb;
                nb.slope = b2.slope - b1.slope;
                // Maps that send block b1 into block b2: P2 E P1^{-1}.
                for (size_t beta = 0; beta < b2.basis.size(); ++beta)
                    for (size_t alpha = 0; alpha < b1.basis.size(); ++alpha) {
                        RatVec w(n, Rat(0));
                        for (size_t i = 0; i < r2; ++i) {
                            if (p2.at(i, off2 + beta) == 0) continue;
                            for (size_t j = 0; j < r1; ++j) {
                                if (p1inv.at(off1 + alpha, j) == 0) continue;
                                w[idx(i, j)] = p2.at(i, off2 + beta) * p1inv.at(off1 + alpha, j);
                            }
                        }
                        nb.basis.push_back(std::move(w));
                    }
                blocks.push_back(std::move(nb));
                off2 += b2.basis.size();
            }
            off1 += b1.basis.size();
        }
        split = merge_equal_slopes(std::move(blocks));
    }
    return FIsocrystal(f1.prime(), std::move(k), std::move(split));
}

FIsocrystal end_crystal(const FIsocrystal& f) { return hom_crystal(f, f); }

namespace {

/* Reduced slope numerator/denominator (d1, r1) of an isoclinic crystal. */
std::pair<long, long> reduced_slope(const FIsocrystal& f) {
    if (!f.isoclinic()) throw std::invalid_argument("operation requires an isoclinic crystal");
    const Rat alpha = f.rank() == 0 ? Rat(0) : f.newton_slopes()[0];
    const Int num = numerator(alpha), den = denominator(alpha);
    return {static_cast<long>(num), static_cast<long>(den)};
}

}  // namespace

std::optional<QuasiSpecialPeriod> quasi_special_period(const FIsocrystal& f,
                                                       std::optional<long> bound) {
    auto [d1, r1] = reduced_slope(f);
    const long limit = bound.value_or(static_cast<long>(f.rank()));
    const EchelonLattice std_l = f.std_lattice();
    const RatMat step = mat_pow(f.matrix(), r1);
    RatMat acc = RatMat::identity(f.rank());
    for (long t = r1; t <= limit; t += r1) {
        acc = acc * step;
        if (apply_map(acc, std_l) == scale_lattice(std_l, (t / r1) * d1))
            return QuasiSpecialPeriod{t, (t / r1) * d1, t == r1};
    }
    return std::nullopt;
}

ManinHeights manin_heights(const FIsocrystal& f) {
    auto [d1, r1] = reduced_slope(f);
    const long r = static_cast<long>(f.rank());
    const long d = r1 == 0 ? 0 : (r / r1) * d1;
    const EchelonLattice std_l = f.std_lattice();
    ManinHeights h;
    const Rat su = pow_p(f.prime(), -d1);
    h.u = min_power(std_l, stabilized_meet_chain(std_l, su * mat_pow(f.matrix(), r1)));
    const Rat sv = pow_p(f.prime(), -d);
    h.v = min_power(std_l, stabilized_meet_chain(std_l, sv * mat_pow(f.matrix(), r)));
    return h;
}

std::pair<long, FIsocrystal> isogeny_kappa(const FIsocrystal& f, const EchelonLattice& sub) {
    if (sub.prime() != f.prime() || sub.ambient() != f.rank())
        throw std::invalid_argument("isogeny_kappa: lattice mismatch");
    if (!sub.is_full_rank()) throw std::invalid_argument("isogeny_kappa: sublattice not full rank");
    const EchelonLattice std_l = f.std_lattice();
    if (!std_l.contains(sub))
        throw std::invalid_argument("isogeny_kappa: sublattice not contained in M");
    const EchelonLattice image = apply_map(f.matrix(), sub);
    if (!sub.contains(image)) throw std::invalid_argument("isogeny_kappa: sublattice not phi-stable");
    const long kappa = min_power(std_l, sub);

    const size_t n = f.rank();
    RatMat c(n, n);
    for (size_t j = 0; j < n; ++j)
        for (size_t i = 0; i < n; ++i) c.at(i, j) = sub.basis()[j][i];
    const RatMat cinv = inverse(c);
    RatMat a2 = cinv * f.matrix() * c;
    std::optional<std::vector<SlopeBlock>> split;
    if (f.splitting()) {
        std::vector<SlopeBlock> blocks;
        for (const SlopeBlock& b : *f.splitting()) {
            SlopeBlock nb{b.slope, {}};
            for (const RatVec& v : b.basis) nb.basis.push_back(mat_vec(cinv, v));
            blocks.push_back(std::move(nb));
        }
        split = std::move(blocks);
    }
    FIsocrystal quotient(f.prime(), std::move(a2), std::move(split));
    if (f.dieudonne() && !quotient.dieudonne())
        throw std::invalid_argument("isogeny_kappa: sublattice breaks the Dieudonne property");
    return {kappa, std::move(quotient)};
}

FIsocrystal extension_crystal(const Int& p, long d, const Rat& gamma) {
    if (d < 3) throw std::invalid_argument("extension_crystal: d must be at least 3");
    if (val_p(gamma, p) != PVal::of(0))
        throw std::invalid_argument("extension_crystal: gamma must be a p-adic unit");
    const size_t n = static_cast<size_t>(2 * d);
    // phi on the ambient basis: e_1 -> p e_2, e_2 -> e_3, ..., e_d -> e_1;
    // e_{d+1} -> p e_{d+2}, ..., e_{2d-1} -> p e_{2d}, e_{2d} -> e_{d+1}.
    RatMat phi(n, n);
    phi.at(1, 0) = Rat(p);
    for (long s = 1; s < d - 1; ++s) phi.at(static_cast<size_t>(s + 1), static_cast<size_t>(s)) = 1;
    phi.at(0, static_cast<size_t>(d - 1)) = 1;
    for (long s = 0; s < d - 1; ++s)
        phi.at(static_cast<size_t>(d + s + 1), static_cast<size_t>(d + s)) = Rat(p);
    phi.at(static_cast<size_t>(d), n - 1) = 1;

    // M is the ambient lattice enlarged by (gamma/p) e_1 + (1/p) e_{d+1};
    // rebase so that M becomes the standard lattice.
    RatMat c(n, n);
    c.at(0, 0) = gamma / Rat(p);
    c.at(static_cast<size_t>(d), 0) = Rat(1) / Rat(p);
    for (size_t j = 1; j < n; ++j) c.at(j, j) = 1;
    const RatMat cinv = inverse(c);
    RatMat a = cinv * phi * c;

    std::vector<SlopeBlock> blocks(2);
    blocks[0].slope = Rat(1, d);
    blocks[1].slope = Rat(d - 1, d);
    for (long s = 0; s < d; ++s) {
        RatVec e(n, Rat(0));
        e[static_cast<size_t>(s)] = 1;
        blocks[0].basis.push_back(mat_vec(cinv, e));
        RatVec e2(n, Rat(0));
        e2[static_cast<size_t>(d + s)] = 1;
        blocks[1].basis.push_back(mat_vec(cinv, e2));
    }
    FIsocrystal f(p, std::move(a), std::move(blocks));
    if (!f.dieudonne()) throw std::logic_error("extension_crystal: construction not Dieudonne");
    return f;
}

FIsocrystal block_crystal(const FIsocrystal& f, size_t block_index) {
    const auto blocks = f.effective_splitting();
    if (block_index >= blocks.size()) throw std::invalid_argument("block_crystal: bad index");
    const SlopeBlock& blk = blocks[block_index];
    const EchelonLattice mi =
        meet(f.std_lattice(), saturate_span(f.prime(), f.rank(), blk.basis));
    const size_t t = mi.rank();
    if (t != blk.basis.size()) throw std::logic_error("block_crystal: intersection rank mismatch");
    RatMat r(t, t);
    for (size_t j = 0; j < t; ++j) {
        auto y = mi.coords(mat_vec(f.matrix(), mi.basis()[j]));
        if (!y) throw std::logic_error("block_crystal: block not phi-stable");
        for (size_t i = 0; i < t; ++i) r.at(i, j) = (*y)[i];
    }
    return FIsocrystal(f.prime(), std::move(r));
}

bool lattice_splits_along_blocks(const FIsocrystal& f) {
    const auto blocks = f.effective_splitting();
    EchelonLattice acc = EchelonLattice::zero(f.prime(), f.rank());
    for (const SlopeBlock& blk : blocks)
        acc = join(acc, meet(f.std_lattice(), saturate_span(f.prime(), f.rank(), blk.basis)));
    return acc == f.std_lattice();
}

}  // namespace pdiv
