#pragma once

/* File formats and report assembly. Rationals serialize as decimal
 * strings "a/b" (or "a"); lattices and matrices as arrays of such
 * strings; key order and indentation are fixed so that parse/serialize
 * round-trips are byte-identical. */

#include "pdiv/levelmod.hpp"
#include "pdiv/permcrystal.hpp"
#include "pdiv/verify.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace pdiv {

using Json = nlohmann::json;

/* {r, pi: [images, 1-indexed], marked: [indices]} */
PermutationDatum datum_from_json(const Json& j);
Json datum_to_json(const PermutationDatum& d);

/* {p, rank, matrix: [["a/b",...]], splitting?: [{slope, basis}], dieudonne: bool} */
FIsocrystal crystal_from_json(const Json& j);
Json crystal_to_json(const FIsocrystal& f);

/* {p, ambient, basis: [["a/b",...]]} */
EchelonLattice lattice_from_json(const Json& j);
Json lattice_to_json(const EchelonLattice& l);

Json suite_to_json(const SuiteResult& r);
std::string suite_to_csv(const SuiteResult& r);

/* Invariant bundle with per-field engine provenance. */
struct InvariantReport {
    Json body;  // full report document

    std::string str() const { return body.dump(2) + "\n"; }
    std::string csv() const;
    std::string table() const;
};

/* Both engines, compared field by field; throws std::logic_error on any
 * disagreement. */
InvariantReport report_for_datum(const PermutationDatum& d, const Int& p);

/* Matrix engine only. window_override extends the alpha/beta/delta
 * tables for crystals without a quasi-special period (the tables are
 * then lower-bound witnesses, and flagged as such). */
InvariantReport report_for_crystal(const FIsocrystal& f,
                                   std::optional<long> window_override = std::nullopt);

std::string dump_json(const Json& j);

}  // namespace pdiv
