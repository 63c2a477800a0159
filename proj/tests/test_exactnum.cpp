#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdiv/lattice.hpp"

#include <random>

using namespace pdiv;

namespace {

RatVec rv(std::initializer_list<Rat> xs) { return RatVec(xs); }

EchelonLattice lat(long p, std::vector<RatVec> gens) {
    const size_t amb = gens.empty() ? 2 : gens[0].size();
    return hnf_basis(Int(p), amb, gens);
}

/* Random full-rank lattice with p-power denominators. */
EchelonLattice random_lattice(std::mt19937_64& rng, long p, size_t n) {
    std::uniform_int_distribution<long> num(-6, 6), den_e(0, 2);
    while (true) {
        std::vector<RatVec> gens(n, RatVec(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                gens[i][j] = Rat(num(rng)) * pow_p(Int(p), -den_e(rng));
        EchelonLattice l = hnf_basis(Int(p), n, gens);
        if (l.is_full_rank()) return l;
    }
}

/* Re-generate the same lattice through a random GL(Z_(p)) change of basis. */
std::vector<RatVec> scrambled_basis(std::mt19937_64& rng, long p, const EchelonLattice& l) {
    std::vector<RatVec> rows = l.basis();
    const size_t m = rows.size();
    std::uniform_int_distribution<long> coef(-3, 3);
    const std::vector<long> units = {1, -1, 1 + p, 2 * p + 1};
    for (int step = 0; step < 12; ++step) {
        const size_t i = rng() % m, j = rng() % m;
        if (i != j) {
            const Rat c(coef(rng));
            for (size_t k = 0; k < rows[i].size(); ++k) rows[i][k] += c * rows[j][k];
        } else {
            const Rat u(units[rng() % units.size()]);
            for (size_t k = 0; k < rows[i].size(); ++k) rows[i][k] *= u;
        }
    }
    return rows;
}

}  // namespace

TEST_CASE("p-adic valuation") {
    CHECK(val_p(Rat(50), Int(5)) == PVal::of(2));
    CHECK(val_p(Rat(3, 4), Int(2)) == PVal::of(-2));
    CHECK(val_p(Rat(0), Int(3)) == PVal::inf());
    CHECK(PVal::of(7) < PVal::inf());
    CHECK(!(PVal::inf() < PVal::of(7)));
    CHECK(PLocalScalar(Int(5), Rat(50)).valuation() == PVal::of(2));
    CHECK(PLocalScalar(Int(5), Rat(50)).is_p_integral());
    CHECK(!PLocalScalar(Int(2), Rat(3, 4)).is_p_integral());
    CHECK(PLocalScalar(Int(3), Rat(0)).is_p_integral());
    CHECK_THROWS_AS(PLocalScalar(Int(4), Rat(1)), std::invalid_argument);
}

TEST_CASE("rational parsing is canonical") {
    CHECK(rat_str(parse_rat("50/100")) == "1/2");
    CHECK(rat_str(parse_rat("-7/14")) == "-1/2");
    CHECK(rat_str(parse_rat("42")) == "42");
    CHECK(parse_rat("3/-6") == Rat(-1, 2));
    CHECK_THROWS_AS(parse_rat("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rat("x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rat(""), std::invalid_argument);
}

TEST_CASE("canonical representatives modulo p^v") {
    CHECK(canon_rep(Rat(5, 2), Int(2), 1) == Rat(1, 2));
    CHECK(canon_rep(Rat(3, 2), Int(2), 1) == Rat(3, 2));
    CHECK(canon_rep(Rat(8), Int(2), 2) == Rat(0));
    CHECK(canon_rep(Rat(1, 2), Int(3), 0) == Rat(0));  // 1/2 is a 3-adic unit times 1
    // Difference always lands in p^v Z_(p).
    for (long v : {0L, 1L, 2L})
        for (long a = -6; a <= 6; ++a)
            for (long b : {1L, 2L, 3L, 4L}) {
                const Rat x(a, b);
                const Rat w = canon_rep(x, Int(2), v);
                if (x != w) CHECK(!(val_p(x - w, Int(2)) < PVal::of(v)));
            }
}

TEST_CASE("hnf examples") {
    const auto id2 = lat(2, {rv({1, 0}), rv({0, 1})});
    CHECK(id2 == EchelonLattice::standard(Int(2), 2));

    // Hand row-reduction: (2,0),(1,1) -> pivot (1,1), remainder (0,-2) -> (0,2).
    const auto l = lat(2, {rv({2, 0}), rv({1, 1})});
    CHECK(l.basis() == std::vector<RatVec>{rv({1, 1}), rv({0, 2})});
    CHECK(l.pivot_vals() == std::vector<long>{0, 1});

    // Lattices need not sit inside the standard one.
    const auto neg = lat(3, {rv({Rat(1, 3), 0}), rv({0, 1})});
    CHECK(neg.pivot_vals() == std::vector<long>{-1, 0});
    CHECK(neg.basis()[0] == rv({Rat(1, 3), 0}));

    CHECK_THROWS_AS(hnf_basis(Int(2), 0, {}), std::invalid_argument);
}

TEST_CASE("hnf is idempotent and canonical under re-generation") {
    std::mt19937_64 rng(20240811);
    for (int trial = 0; trial < 60; ++trial) {
        const long p = trial % 2 ? 2 : 3;
        const size_t n = 2 + trial % 3;
        const EchelonLattice l = random_lattice(rng, p, n);
        CHECK(hnf_basis(l.prime(), n, l.basis()) == l);
        const EchelonLattice l2 = hnf_basis(l.prime(), n, scrambled_basis(rng, p, l));
        CHECK(l == l2);
    }
}

TEST_CASE("meet examples") {
    const auto std2 = EchelonLattice::standard(Int(2), 2);
    const auto sub = lat(2, {rv({2, 0}), rv({0, 1})});
    CHECK(meet(std2, std2) == std2);
    CHECK(meet(std2, sub) == sub);
    const auto l = lat(2, {rv({1, 1}), rv({2, 0})});
    CHECK(meet(l, std2) == l);  // already inside the standard lattice
    CHECK_THROWS_AS(meet(std2, EchelonLattice::standard(Int(2), 3)), std::invalid_argument);
}

TEST_CASE("join examples") {
    const auto std2 = EchelonLattice::standard(Int(2), 2);
    CHECK(join(std2, std2) == std2);
    const auto half = lat(2, {rv({Rat(1, 2), 0})});
    CHECK(join(std2, half) == lat(2, {rv({Rat(1, 2), 0}), rv({0, 1})}));
    CHECK(join(scale_lattice(std2, 1), std2) == std2);
}

TEST_CASE("apply_map examples") {
    const auto std2 = EchelonLattice::standard(Int(2), 2);
    CHECK(apply_map(RatMat::identity(2), std2) == std2);
    RatMat d(2, 2);
    d.at(0, 0) = 2;
    d.at(1, 1) = 1;
    CHECK(apply_map(d, std2) == lat(2, {rv({2, 0}), rv({0, 1})}));
    RatMat t(2, 2);
    t.at(0, 1) = 2;
    t.at(1, 0) = 1;
    CHECK(apply_map(t, std2) == lat(2, {rv({2, 0}), rv({0, 1})}));
    RatMat sing(2, 2);
    sing.at(0, 0) = 1;
    CHECK_THROWS_AS(apply_map(sing, std2), std::invalid_argument);
}

TEST_CASE("relative divisors and min_power examples") {
    const auto std2 = EchelonLattice::standard(Int(2), 2);
    CHECK(rel_divisors(std2, std2) == std::vector<long>{0, 0});
    CHECK(rel_divisors(std2, scale_lattice(std2, 1)) == std::vector<long>{1, 1});
    CHECK(min_power(std2, std2) == 0);
    CHECK(min_power(std2, scale_lattice(std2, 1)) == 1);
    CHECK(min_power(scale_lattice(std2, -1), std2) == 1);
    CHECK_THROWS_AS(min_power(std2, lat(2, {rv({1, 0})})), std::invalid_argument);
}

TEST_CASE("lattice algebra laws on random inputs") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const long p = trial % 2 ? 2 : 5;
        const size_t n = 2 + trial % 2;
        const auto a = random_lattice(rng, p, n);
        const auto b = random_lattice(rng, p, n);
        const auto c = random_lattice(rng, p, n);
        CHECK(meet(a, b) == meet(b, a));
        CHECK(join(a, b) == join(b, a));
        CHECK(meet(a, meet(b, c)) == meet(meet(a, b), c));
        CHECK(join(a, join(b, c)) == join(join(a, b), c));
        CHECK(meet(a, a) == a);
        CHECK(join(a, a) == a);
        CHECK(join(meet(a, b), b) == b);
        CHECK(meet(join(a, b), b) == b);

        // Divisor duality and the min_power identity.
        auto dab = rel_divisors(a, b);
        auto dba = rel_divisors(b, a);
        std::reverse(dba.begin(), dba.end());
        for (auto& x : dba) x = -x;
        CHECK(dab == dba);
        CHECK(min_power(a, b) == std::max(0L, dab.back()));

        // Containment characterization of the extreme divisors.
        const long lo = dab.front(), hi = dab.back();
        CHECK(scale_lattice(a, lo).contains(b));
        CHECK(!scale_lattice(a, lo + 1).contains(b));
        CHECK(b.contains(scale_lattice(a, hi)));
        CHECK(!b.contains(scale_lattice(a, hi - 1)));

        // Meet and join are monotone along containment chains.
        const auto sub = meet(a, b);
        CHECK(meet(b, c).contains(meet(sub, c)));
        CHECK(join(b, c).contains(join(sub, c)));
    }
}

TEST_CASE("meet of partial-rank lattices") {
    // Intersections are exact for lattices of different ranks too.
    const auto plane = lat(2, {rv({1, 0, 0}), rv({0, 2, 0})});
    const auto line = lat(2, {rv({2, 4, 0})});
    const auto both = meet(plane, line);
    CHECK(both.rank() == 1);
    CHECK(both.basis()[0] == rv({2, 4, 0}));
    const auto skew = lat(2, {rv({1, 1, 0})});
    CHECK(meet(plane, skew).rank() == 1);
    CHECK(meet(plane, skew).basis()[0] == rv({2, 2, 0}));  // needs y even
    const auto disjoint = lat(2, {rv({0, 0, 1})});
    CHECK(meet(plane, disjoint).rank() == 0);
    CHECK(join(plane, disjoint).rank() == 3);
}

TEST_CASE("apply_map round trip") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<long> e(-4, 4);
    for (int trial = 0; trial < 25; ++trial) {
        const auto l = random_lattice(rng, 2, 3);
        RatMat t(3, 3);
        do {
            for (size_t i = 0; i < 3; ++i)
                for (size_t j = 0; j < 3; ++j) t.at(i, j) = Rat(e(rng));
        } while (determinant(t) == 0);
        CHECK(apply_map(t, apply_map(inverse(t), l)) == l);
    }
}

TEST_CASE("saturation") {
    const auto sat = saturate_span(Int(2), 2, {rv({2, 1})});
    CHECK(sat.basis() == std::vector<RatVec>{rv({2, 1})});
    const auto full = saturate_span(Int(2), 2, {rv({Rat(1, 2), 0}), rv({0, 3})});
    CHECK(full == EchelonLattice::standard(Int(2), 2));
    // Saturation contains the generating lattice and is saturated.
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<long> e(-4, 4);
        std::vector<RatVec> gens(2, RatVec(4));
        for (auto& g : gens)
            for (auto& x : g) x = Rat(e(rng));
        const auto s = saturate_span(Int(3), 4, gens);
        CHECK(s.contains(hnf_basis(Int(3), 4, gens)));
        CHECK(saturate_span(Int(3), 4, s.basis()) == s);
    }
}

TEST_CASE("charpoly and linear algebra sanity") {
    RatMat a(2, 2);
    a.at(0, 1) = 2;
    a.at(1, 0) = 1;
    const auto cp = charpoly(a);  // x^2 - 2
    CHECK(cp == std::vector<Rat>{Rat(-2), Rat(0), Rat(1)});
    CHECK(determinant(a) == Rat(-2));
    CHECK(inverse(a) * a == RatMat::identity(2));
    CHECK(mat_pow(a, 2) == Rat(2) * RatMat::identity(2));
    CHECK(mat_pow(a, -1) == inverse(a));
    const auto ns = nullspace(a);
    CHECK(ns.empty());
    RatMat sing(2, 2);
    sing.at(0, 0) = 1;
    sing.at(0, 1) = 2;
    CHECK(nullspace(sing).size() == 1);
    CHECK_THROWS_AS(inverse(sing), std::domain_error);
}
