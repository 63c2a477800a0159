#pragma once

/* Finitely generated Z_(p)-submodules of a rational vector space in a
 * canonical echelon form: pivots are pure powers of p (minimal-valuation
 * pivoting), entries above a pivot are reduced to the canonical
 * representative modulo the pivot power. Two equal lattices always store
 * identical bases, so equality is plain data comparison. */

#include "pdiv/matrix.hpp"

#include <vector>

namespace pdiv {

class EchelonLattice {
  public:
    static EchelonLattice standard(const Int& p, size_t ambient);
    static EchelonLattice zero(const Int& p, size_t ambient);

    const Int& prime() const { return p_; }
    size_t ambient() const { return ambient_; }
    size_t rank() const { return basis_.size(); }
    const std::vector<RatVec>& basis() const { return basis_; }
    const std::vector<size_t>& pivot_cols() const { return pivot_cols_; }
    const std::vector<long>& pivot_vals() const { return pivot_vals_; }

    bool is_full_rank() const { return rank() == ambient_; }
    /* One non-zero entry per basis vector (diagonal-style lattice). */
    bool is_monomial() const;

    bool contains(const RatVec& x) const;
    bool contains(const EchelonLattice& other) const;

    /* Coordinates of x in the stored basis (any rational solution), or
     * nullopt when x is outside the rational span. */
    std::optional<RatVec> coords(const RatVec& x) const;

    bool operator==(const EchelonLattice& o) const {
        return p_ == o.p_ && ambient_ == o.ambient_ && basis_ == o.basis_;
    }

  private:
    EchelonLattice(Int p, size_t ambient) : p_(std::move(p)), ambient_(ambient) {}

    Int p_;
    size_t ambient_;
    std::vector<RatVec> basis_;
    std::vector<size_t> pivot_cols_;
    std::vector<long> pivot_vals_;

    friend EchelonLattice hnf_basis(const Int&, size_t, const std::vector<RatVec>&);
};

/* Canonical basis of the Z_(p)-span; idempotent on canonical bases. */
EchelonLattice hnf_basis(const Int& p, size_t ambient, const std::vector<RatVec>& generators);

EchelonLattice meet(const EchelonLattice& l1, const EchelonLattice& l2);
EchelonLattice join(const EchelonLattice& l1, const EchelonLattice& l2);

/* Canonical form of T(L) for invertible T; the preimage is apply_map of
 * the exact inverse. */
EchelonLattice apply_map(const RatMat& t, const EchelonLattice& l);

EchelonLattice scale_lattice(const EchelonLattice& l, long p_exponent);

/* The relative elementary-divisor valuations of l2 inside l1 (both must
 * span the same rational subspace); sorted ascending, negative entries
 * allowed. min = largest a with l2 <= p^a l1, max = smallest b with
 * p^b l1 <= l2. */
std::vector<long> rel_divisors(const EchelonLattice& l1, const EchelonLattice& l2);

/* Smallest ell >= 0 with p^ell * l1 <= l2; throws when no power works. */
long min_power(const EchelonLattice& l1, const EchelonLattice& l2);

/* Z_(p)^ambient intersected with the rational span of the given vectors. */
EchelonLattice saturate_span(const Int& p, size_t ambient, const std::vector<RatVec>& span_vectors);

/* Z_(p)-saturated basis of { y in Z_(p)^m : y * M = 0 }. */
std::vector<RatVec> left_kernel_zp(const Int& p, const std::vector<RatVec>& m_rows, size_t ncols);

/* Stabilized intersection chain N <- meet(N, T(N)); a fixed point
 * certifies T(N) >= N, hence permanence of the chain. */
EchelonLattice stabilized_meet_chain(const EchelonLattice& start, const RatMat& t);

}  // namespace pdiv
