#pragma once

/* F-cyclic Dieudonne modules from permutation data: phi sends e_s to
 * p e_{pi(s)} when s is marked and to e_{pi(s)} otherwise. Every
 * invariant here is computed from mark counts along the cycles, over
 * certified finite windows; the matrix engine recomputes them on demand
 * through to_isocrystal. Basis indices are 1-based throughout. */

#include "pdiv/isocrystal.hpp"

#include <string>
#include <vector>

namespace pdiv {

class PermutationDatum {
  public:
    /* pi: images, 1-indexed (pi[s-1] is the image of s); marked: subset
     * of {1..r}. Throws unless pi is a bijection and marked is in range. */
    PermutationDatum(size_t r, const std::vector<size_t>& pi, const std::vector<size_t>& marked);

    size_t r() const { return r_; }
    size_t d() const { return d_; }
    size_t c() const { return r_ - d_; }
    size_t image(size_t s) const { return pi_[s]; }
    size_t preimage(size_t s) const { return pi_inv_[s]; }
    bool marked(size_t s) const { return marked_[s]; }

    std::vector<size_t> marked_list() const;
    std::vector<size_t> pi_list() const;  // 1-indexed images in order

    /* Cycles in traversal order, each starting at its smallest element,
     * sorted by that element. */
    const std::vector<std::vector<size_t>>& cycles() const { return cycles_; }
    size_t cycle_of(size_t s) const { return cycle_of_[s]; }

    /* The datum restricted to one cycle, indices compressed to 1..r_i. */
    PermutationDatum restrict_to_cycle(size_t cycle_index) const;

  private:
    size_t r_;
    size_t d_ = 0;
    std::vector<size_t> pi_, pi_inv_;  // size r+1, slot 0 unused
    std::vector<bool> marked_;
    std::vector<std::vector<size_t>> cycles_;
    std::vector<size_t> cycle_of_;
};

/* Number of marked elements among s, pi(s), ..., pi^{q-1}(s). Satisfies
 * the cocycle law eta_{a+b}(s) = eta_a(s) + eta_b(pi^a(s)). */
long eta(const PermutationDatum& datum, long q, size_t s);

struct CycleStats {
    std::vector<size_t> support;
    size_t r_i = 0, c_i = 0, d_i = 0;
    Rat slope;
    long r1 = 0, d1 = 0;  // reduced slope
    long r2 = 0, d2 = 0;  // quasi-special period
    bool special = false;
    std::vector<long> alpha, beta, delta;  // values at q = 1..r2
    std::string word;                      // marks along the cycle, canonical rotation
};

std::vector<CycleStats> cycle_stats(const PermutationDatum& datum);

/* The pair number ell(e_s, e_t): the deficiency sup over the certified
 * window, forward when slope(s) >= slope(t) and backward otherwise. */
long pair_deficiency(const PermutationDatum& datum, size_t s, size_t t);

struct PermTorsion {
    long ell = 0;
    int epsilon = 0;
    char rule = 'b';
    long n = 0;  // isomorphism number; equals ell on this class of inputs
};

PermTorsion perm_level_torsion(const PermutationDatum& datum);

/* Condition (*): every eta_q(s) stays within {floor(q a_i), floor(q a_i)+1}
 * for q up to the cycle length. */
bool is_minimal(const PermutationDatum& datum);
bool is_special(const PermutationDatum& datum);

/* Multiset of canonical cyclic mark-words, sorted by (length, word);
 * the isomorphism key for these groups. */
struct NecklaceClass {
    std::vector<std::string> words;
    bool operator==(const NecklaceClass&) const = default;
    bool operator<(const NecklaceClass& o) const { return words < o.words; }
    std::string str() const;
};

NecklaceClass necklace_class(const PermutationDatum& datum);

/* Same permutation with the marked set complemented. */
PermutationDatum dual_datum(const PermutationDatum& datum);

/* Matrix model: column s holds p^{[s marked]} times the unit vector at
 * pi(s); splitting groups the cycles by slope. */
FIsocrystal to_isocrystal(const PermutationDatum& datum, const Int& p);

struct CycleHeights {
    long u = 0, v = 0;
};

/* Per-cycle Manin heights over the exact periodic window. */
std::vector<CycleHeights> perm_manin_heights(const PermutationDatum& datum);

/* Lexicographically smallest rotation of a cyclic word. */
std::string canonical_rotation(const std::string& w);

}  // namespace pdiv
