#pragma once

/* Level modules and level torsions. O_+ (resp. O_0, O_-) is the largest
 * sublattice of End(M) inside the positive (zero, negative) slope part
 * whose forward (two-sided, backward) phi-iterates all stay integral;
 * O = O_+ + O_0 + O_- and the level torsion measures End(M)/O, adjusted
 * by the non-nilpotence rule. Everything is exact: the chains stop with
 * a stationarity certificate. */

#include "pdiv/isocrystal.hpp"

#include <vector>

namespace pdiv {

struct LevelModule {
    /* All four lattices live in End coordinates (ambient rank^2). */
    EchelonLattice o_plus, o_zero, o_minus, o;

    LevelModule(EchelonLattice p, EchelonLattice z, EchelonLattice m, EchelonLattice all)
        : o_plus(std::move(p)), o_zero(std::move(z)), o_minus(std::move(m)), o(std::move(all)) {}
};

struct TorsionReport {
    long ell = 0;
    int epsilon = 0;
    char rule = 'b';
    /* Rule (a) fired on an input that is not an ordinary Dieudonne
     * module; surfaced rather than silently resolved, since the ordinary
     * case is the only one the Dieudonne classification pins down. */
    bool rule_a_beyond_ordinary = false;
    /* Pairwise block torsions, filled on request when the lattice splits
     * along the slope blocks; entry [i][j] is the torsion of the pair of
     * block sub-crystals (i, j). */
    std::vector<std::vector<long>> pair_torsions;
    bool has_pair_torsions = false;
};

/* Requires a verified splitting (the trivial one is synthesized for
 * isoclinic crystals). */
LevelModule level_module(const FIsocrystal& f);

TorsionReport level_torsion(const FIsocrystal& f, bool with_pair_torsions = false);

/* Smallest ell with p^ell phi^q(Hom(M1, M2)) integral for all q (forward
 * when slope(f1) <= slope(f2), backward otherwise); both inputs must be
 * isoclinic. */
long pair_level_torsion(const FIsocrystal& f1, const FIsocrystal& f2);

/* Level torsion of the subalgebra spanned by g_basis, which must be a
 * unital, multiplicatively closed, saturated and slope-graded subalgebra
 * of End(M). */
TorsionReport subalgebra_level_torsion(const FIsocrystal& f, const std::vector<RatMat>& g_basis);

RatVec vectorize(const RatMat& x);
RatMat unvectorize(const RatVec& v, size_t rows, size_t cols);

}  // namespace pdiv
