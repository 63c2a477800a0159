#pragma once

/* Exhaustive small-case verification: one canonical representative per
 * necklace class, and suites that sweep the bounds, equalities and
 * dualities over those classes (plus seeded isogeny sampling). Every
 * suite is a pure function of its parameters and seed. */

#include "pdiv/levelmod.hpp"
#include "pdiv/permcrystal.hpp"

#include <string>
#include <vector>

namespace pdiv {

struct SuiteParams {
    long max_rank = 8;
    std::vector<Int> primes = {Int(2)};
    unsigned long long seed = 0;
    long samples = 100;
};

struct SuiteResult {
    std::string suite;
    std::string params;
    long cases = 0;
    std::vector<std::string> failures;
    double seconds = 0.0;
};

/* All binary necklaces (lexicographically minimal rotations) of the
 * given length. */
std::vector<std::string> binary_necklaces(size_t length);

/* One representative datum per multiset of marked necklaces with total
 * length c + d and total weight d. */
std::vector<PermutationDatum> enumerate_classes(long c, long d);

/* Every class of total rank 1..max_rank. */
std::vector<PermutationDatum> enumerate_classes_up_to(long max_rank);

std::vector<std::string> suite_names();

/* The rank-16 pair of marked octic cycles that attains the equality case
 * of the multi-cycle bound. */
PermutationDatum two_octic_cycles_datum();

/* Suites: traverso, minimality, sum_bound, pair_symmetry, duality,
 * crosscheck, isogeny, monotony, small_torsion, extension_bound.
 * Throws std::invalid_argument on an unknown name. */
SuiteResult run_suite(const std::string& name, const SuiteParams& params);

}  // namespace pdiv
