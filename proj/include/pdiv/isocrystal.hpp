#pragma once

/* Latticed F-isocrystals in matrix form: the lattice M is always the
 * standard one and the matrix gives the action of phi on its basis, so
 * equality of invariants reduces to exact lattice computations. */

#include "pdiv/lattice.hpp"

#include <optional>
#include <vector>

namespace pdiv {

/* One isoclinic constituent of a verified splitting: a rational basis of
 * a phi-stable subspace on which every Newton slope equals `slope`. */
struct SlopeBlock {
    Rat slope;
    std::vector<RatVec> basis;
};

class FIsocrystal {
  public:
    /* Validates everything: invertibility, phi-stability of the declared
     * blocks, isoclinicity and correctness of each declared slope, strict
     * ordering of slopes, spanning. The Dieudonne flag is computed from
     * pM <= A(M) <= M. */
    FIsocrystal(Int p, RatMat a, std::optional<std::vector<SlopeBlock>> splitting = std::nullopt);

    const Int& prime() const { return p_; }
    size_t rank() const { return rank_; }
    const RatMat& matrix() const { return a_; }
    bool dieudonne() const { return dieudonne_; }
    const std::optional<std::vector<SlopeBlock>>& splitting() const { return splitting_; }

    EchelonLattice std_lattice() const { return EchelonLattice::standard(p_, rank_); }

    /* Newton slope multiset, ascending. */
    const std::vector<Rat>& newton_slopes() const { return slopes_; }
    bool isoclinic() const;

    /* The declared splitting, or the trivial one when isoclinic. */
    std::vector<SlopeBlock> effective_splitting() const;
    bool has_effective_splitting() const;

  private:
    Int p_;
    size_t rank_;
    RatMat a_;
    std::optional<std::vector<SlopeBlock>> splitting_;
    std::vector<Rat> slopes_;
    bool dieudonne_ = false;
};

struct HodgeNewtonProfile {
    size_t c = 0, d = 0;
    std::vector<Rat> slopes;
    bool dieudonne = false;
    bool isoclinic = false;
    bool ordinary = false;
};

HodgeNewtonProfile classify(const FIsocrystal& f);

struct AlphaBetaDelta {
    long alpha = 0, beta = 0, delta = 0;
};

/* Largest alpha with phi^q(M) <= p^alpha M and smallest beta with
 * p^beta M <= phi^q(M), q >= 1. */
AlphaBetaDelta alpha_beta_delta(const FIsocrystal& f, long q);

/* Dual Dieudonne module: matrix p * (A^T)^{-1}, slopes 1 - alpha. */
FIsocrystal dual(const FIsocrystal& f);

FIsocrystal direct_sum(const FIsocrystal& f1, const FIsocrystal& f2);

/* Hom crystal on the space of rank2 x rank1 matrices, X -> A2 X A1^{-1}. */
FIsocrystal hom_crystal(const FIsocrystal& f1, const FIsocrystal& f2);

FIsocrystal end_crystal(const FIsocrystal& f);

struct QuasiSpecialPeriod {
    long r2 = 0;  // smallest t with phi^t(M) = p^{t * slope} M
    long d2 = 0;
    bool special = false;  // t equals the reduced slope denominator
};

/* Searches t in {r1, 2*r1, ...} up to `bound` (default: rank). */
std::optional<QuasiSpecialPeriod> quasi_special_period(const FIsocrystal& f,
                                                       std::optional<long> bound = std::nullopt);

struct ManinHeights {
    long u = 0;  // height: p^u annihilates M / M_0
    long v = 0;  // quasi-height
};

/* Exact heights of an isoclinic crystal through stabilized meet chains. */
ManinHeights manin_heights(const FIsocrystal& f);

/* kappa = min_power(M, sub) together with the crystal of (sub, phi)
 * written in a basis of sub. */
std::pair<long, FIsocrystal> isogeny_kappa(const FIsocrystal& f, const EchelonLattice& sub);

/* Rank-2d Dieudonne crystal extending a slope-1/d block by a slope-
 * (d-1)/d block across an index-p lattice enlargement; gamma must be a
 * p-adic unit and d >= 3. */
FIsocrystal extension_crystal(const Int& p, long d, const Rat& gamma);

/* The sub-crystal carried by M intersected with splitting block i, in a
 * basis of that intersection lattice. */
FIsocrystal block_crystal(const FIsocrystal& f, size_t block_index);

/* Whether M equals the direct sum of its block intersection lattices. */
bool lattice_splits_along_blocks(const FIsocrystal& f);

/* Ascending root valuations of a monic rational polynomial, from the
 * lower Newton polygon of its coefficients. */
std::vector<Rat> newton_slopes_of_poly(const std::vector<Rat>& coeffs, const Int& p);

}  // namespace pdiv
