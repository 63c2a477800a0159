#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdiv/isocrystal.hpp"
#include "pdiv/permcrystal.hpp"
#include "pdiv/verify.hpp"

#include <random>

using namespace pdiv;

namespace {

RatMat mat2(Rat a, Rat b, Rat c, Rat d) {
    RatMat m(2, 2);
    m.at(0, 0) = a;
    m.at(0, 1) = b;
    m.at(1, 0) = c;
    m.at(1, 1) = d;
    return m;
}

RatMat diag(std::vector<Rat> xs) {
    RatMat m(xs.size(), xs.size());
    for (size_t i = 0; i < xs.size(); ++i) m.at(i, i) = xs[i];
    return m;
}

/* Single marked cycle (1 2 ... r) with marks on {1..d}. */
PermutationDatum circular(size_t r, size_t d) {
    std::vector<size_t> pi(r), marked;
    for (size_t s = 1; s <= r; ++s) pi[s - 1] = s % r + 1;
    for (size_t s = 1; s <= d; ++s) marked.push_back(s);
    return PermutationDatum(r, pi, marked);
}

}  // namespace

TEST_CASE("newton polygon slope extraction") {
    // x^2 - 2: one segment of slope -1/2.
    CHECK(newton_slopes_of_poly({Rat(-2), Rat(0), Rat(1)}, Int(2)) ==
          std::vector<Rat>{Rat(1, 2), Rat(1, 2)});
    // (x - 1)(x - 2) over p = 2: slopes 0 and 1.
    CHECK(newton_slopes_of_poly({Rat(2), Rat(-3), Rat(1)}, Int(2)) ==
          std::vector<Rat>{Rat(0), Rat(1)});
    CHECK(newton_slopes_of_poly({Rat(8), Rat(0), Rat(0), Rat(1)}, Int(2)) ==
          std::vector<Rat>(3, Rat(1)));
}

TEST_CASE("construction and validation") {
    const FIsocrystal etale(Int(2), RatMat::identity(2));
    CHECK(etale.dieudonne());
    const auto prof = classify(etale);
    CHECK(prof.c == 2);
    CHECK(prof.d == 0);
    CHECK(prof.ordinary);

    const FIsocrystal ss(Int(2), mat2(0, 2, 1, 0));
    CHECK(ss.dieudonne());
    CHECK(ss.isoclinic());
    CHECK(ss.newton_slopes() == std::vector<Rat>{Rat(1, 2), Rat(1, 2)});

    CHECK_THROWS_AS(FIsocrystal(Int(2), mat2(1, 0, 0, 0)), std::domain_error);

    // Splitting validation: declared slope must match, blocks must be stable.
    std::vector<SlopeBlock> good{{Rat(0), {{Rat(1), Rat(0)}}}, {Rat(1), {{Rat(0), Rat(1)}}}};
    CHECK_NOTHROW(FIsocrystal(Int(2), diag({Rat(1), Rat(2)}), good));
    std::vector<SlopeBlock> bad_slope{{Rat(0), {{Rat(1), Rat(0)}}}, {Rat(1, 2), {{Rat(0), Rat(1)}}}};
    CHECK_THROWS_AS(FIsocrystal(Int(2), diag({Rat(1), Rat(2)}), bad_slope), std::invalid_argument);
    std::vector<SlopeBlock> unstable{{Rat(1, 2), {{Rat(1), Rat(0)}}}, {Rat(1, 2), {{Rat(0), Rat(1)}}}};
    CHECK_THROWS_AS(FIsocrystal(Int(2), mat2(0, 2, 1, 0), unstable), std::invalid_argument);
    std::vector<SlopeBlock> unsorted{{Rat(1), {{Rat(0), Rat(1)}}}, {Rat(0), {{Rat(1), Rat(0)}}}};
    CHECK_THROWS_AS(FIsocrystal(Int(2), diag({Rat(1), Rat(2)}), unsorted), std::invalid_argument);
}

TEST_CASE("classification") {
    const auto prof = classify(FIsocrystal(Int(2), diag({Rat(1), Rat(2)})));
    CHECK(prof.c == 1);
    CHECK(prof.d == 1);
    CHECK(prof.slopes == std::vector<Rat>{Rat(0), Rat(1)});
    CHECK(prof.ordinary);
    CHECK(!prof.isoclinic);

    // Circular datum with c = d = 2 is supersingular.
    const FIsocrystal f = to_isocrystal(circular(4, 2), Int(2));
    CHECK(classify(f).slopes == std::vector<Rat>(4, Rat(1, 2)));
    CHECK(classify(f).isoclinic);

    CHECK(classify(FIsocrystal(Int(2), mat2(0, 2, 1, 0))).isoclinic);
}

TEST_CASE("alpha, beta, delta") {
    const FIsocrystal id(Int(3), RatMat::identity(2));
    for (long q : {1L, 2L, 5L}) {
        const auto ab = alpha_beta_delta(id, q);
        CHECK(ab.alpha == 0);
        CHECK(ab.beta == 0);
        CHECK(ab.delta == 0);
    }
    for (long d : {2L, 3L}) {
        const FIsocrystal f = to_isocrystal(circular(2 * d, d), Int(2));
        const auto ab = alpha_beta_delta(f, d);
        CHECK(ab.alpha == 0);
        CHECK(ab.beta == d);
        CHECK(ab.delta == d);
    }
    // First octic cycle of the rank-16 pair: delta table (1,2,2,2,2,2,1,0).
    const PermutationDatum cyc = two_octic_cycles_datum().restrict_to_cycle(0);
    const FIsocrystal f8 = to_isocrystal(cyc, Int(2));
    const std::vector<long> want{1, 2, 2, 2, 2, 2, 1, 0};
    for (long q = 1; q <= 8; ++q) CHECK(alpha_beta_delta(f8, q).delta == want[q - 1]);
    CHECK_THROWS_AS(alpha_beta_delta(id, 0), std::invalid_argument);
}

TEST_CASE("duals") {
    const FIsocrystal f(Int(2), diag({Rat(1), Rat(2)}),
                        std::vector<SlopeBlock>{{Rat(0), {{Rat(1), Rat(0)}}},
                                                {Rat(1), {{Rat(0), Rat(1)}}}});
    const FIsocrystal fd = dual(f);
    const auto prof = classify(fd);
    CHECK(prof.c == 1);
    CHECK(prof.d == 1);
    CHECK(prof.slopes == std::vector<Rat>{Rat(0), Rat(1)});
    CHECK(dual(fd).matrix() == f.matrix());

    // Slope-1/3 circular crystal dualizes to slope 2/3.
    const FIsocrystal c3 = to_isocrystal(circular(3, 1), Int(5));
    CHECK(dual(c3).newton_slopes() == std::vector<Rat>(3, Rat(2, 3)));

    CHECK_THROWS_AS(dual(FIsocrystal(Int(2), diag({Rat(4), Rat(1)}))), std::invalid_argument);
}

TEST_CASE("direct sums") {
    const FIsocrystal a(Int(2), diag({Rat(1)}));
    const FIsocrystal b(Int(2), diag({Rat(2)}));
    const auto sum = direct_sum(a, b);
    CHECK(classify(sum).c == 1);
    CHECK(classify(sum).d == 1);
    CHECK(classify(sum).ordinary);
    CHECK(sum.splitting().has_value());
    CHECK(sum.splitting()->size() == 2);

    const FIsocrystal zero(Int(2), RatMat(0, 0));
    CHECK(direct_sum(a, zero).matrix() == a.matrix());
    CHECK(direct_sum(zero, a).matrix() == a.matrix());

    const PermutationDatum g = two_octic_cycles_datum();
    const auto s1 = direct_sum(to_isocrystal(g.restrict_to_cycle(0), Int(2)),
                               to_isocrystal(g.restrict_to_cycle(1), Int(2)));
    CHECK(s1.rank() == 16);
    CHECK(classify(s1).c == 8);
    CHECK(classify(s1).d == 8);
    // Equal slopes merge into a single splitting block.
    CHECK(s1.splitting()->size() == 1);

    CHECK_THROWS_AS(direct_sum(a, FIsocrystal(Int(3), diag({Rat(1)}))), std::invalid_argument);
}

TEST_CASE("hom crystals") {
    const FIsocrystal u1(Int(2), diag({Rat(3)}));
    const FIsocrystal u2(Int(2), diag({Rat(5)}));
    const auto h = hom_crystal(u1, u2);
    CHECK(h.rank() == 1);
    CHECK(h.newton_slopes() == std::vector<Rat>{Rat(0)});

    const auto e = end_crystal(FIsocrystal(Int(2), mat2(0, 2, 1, 0)));
    CHECK(e.rank() == 4);
    CHECK(e.newton_slopes() == std::vector<Rat>(4, Rat(0)));

    const FIsocrystal ord(Int(2), diag({Rat(1), Rat(2)}),
                          std::vector<SlopeBlock>{{Rat(0), {{Rat(1), Rat(0)}}},
                                                  {Rat(1), {{Rat(0), Rat(1)}}}});
    CHECK(end_crystal(ord).newton_slopes() ==
          std::vector<Rat>{Rat(-1), Rat(0), Rat(0), Rat(1)});
    // The induced splitting groups the slope differences.
    CHECK(end_crystal(ord).splitting()->size() == 3);
}

TEST_CASE("quasi-special periods") {
    for (long d : {1L, 2L, 3L}) {
        const FIsocrystal f = to_isocrystal(circular(2 * d, d), Int(2));
        const auto per = quasi_special_period(f);
        REQUIRE(per.has_value());
        CHECK(per->r2 == 2 * d);
        CHECK(per->d2 == d);
        CHECK(per->special == (d == 1));
    }
    const FIsocrystal scaled(Int(3), diag({Rat(3), Rat(3)}));
    const auto per = quasi_special_period(scaled);
    REQUIRE(per.has_value());
    CHECK(per->r2 == 1);
    CHECK(per->d2 == 1);
    CHECK(per->special);

    const PermutationDatum cyc = two_octic_cycles_datum().restrict_to_cycle(0);
    const auto per8 = quasi_special_period(to_isocrystal(cyc, Int(2)));
    REQUIRE(per8.has_value());
    CHECK(per8->r2 == 8);
    CHECK(per8->d2 == 4);
    CHECK_THROWS_AS(quasi_special_period(FIsocrystal(Int(2), diag({Rat(1), Rat(2)}))),
                    std::invalid_argument);
}

TEST_CASE("manin heights") {
    const FIsocrystal special(Int(2), mat2(0, 2, 1, 0));
    CHECK(manin_heights(special).u == 0);
    CHECK(manin_heights(special).v == 0);

    // c = d = 2 circular crystal: the chain gives u = 1, v = 0.
    const FIsocrystal f = to_isocrystal(circular(4, 2), Int(2));
    const ManinHeights h = manin_heights(f);
    CHECK(h.u == 1);
    CHECK(h.v == 0);

    // Height duality u(F) = u(dual F) on circular data.
    for (size_t r = 2; r <= 5; ++r)
        for (size_t d = 1; d < r; ++d) {
            const FIsocrystal g = to_isocrystal(circular(r, d), Int(2));
            CHECK(manin_heights(g).u == manin_heights(dual(g)).u);
            CHECK(manin_heights(g).v == manin_heights(dual(g)).v);
        }
}

TEST_CASE("isogeny kappa") {
    const FIsocrystal f = to_isocrystal(circular(4, 2), Int(2));
    const auto std_l = f.std_lattice();
    const auto [k0, same] = isogeny_kappa(f, std_l);
    CHECK(k0 == 0);
    CHECK(same.matrix() == f.matrix());
    const auto [k1, conj] = isogeny_kappa(f, scale_lattice(std_l, 1));
    CHECK(k1 == 1);
    CHECK(conj.matrix() == f.matrix());
    CHECK_THROWS_AS(isogeny_kappa(f, scale_lattice(std_l, -1)), std::invalid_argument);
}

TEST_CASE("extension crystal") {
    const FIsocrystal f = extension_crystal(Int(2), 3, Rat(1));
    CHECK(f.rank() == 6);
    CHECK(f.dieudonne());
    std::vector<Rat> want(3, Rat(1, 3));
    want.insert(want.end(), 3, Rat(2, 3));
    CHECK(f.newton_slopes() == want);
    CHECK(f.splitting()->size() == 2);

    CHECK_THROWS_AS(extension_crystal(Int(2), 3, Rat(2)), std::invalid_argument);
    CHECK_THROWS_AS(extension_crystal(Int(2), 2, Rat(1)), std::invalid_argument);

    // The unenlarged lattice sits at index p: kappa = 1.
    RatMat c(6, 6);
    c.at(0, 0) = Rat(1, 2);
    c.at(3, 0) = Rat(1, 2);
    for (size_t j = 1; j < 6; ++j) c.at(j, j) = 1;
    const RatMat cinv = inverse(c);
    std::vector<RatVec> gens;
    for (size_t i = 0; i < 6; ++i) {
        RatVec e(6, Rat(0));
        e[i] = 1;
        gens.push_back(mat_vec(cinv, e));
    }
    const auto sub = hnf_basis(Int(2), 6, gens);
    const auto [kappa, quot] = isogeny_kappa(f, sub);
    CHECK(kappa == 1);
    CHECK(quot.dieudonne());
}

TEST_CASE("alpha and beta are sharp containment exponents") {
    // M <= p^{-beta} phi^q(M) <= p^{-delta} M, and neither containment
    // survives tightening by one power.
    for (auto [r, d] : std::vector<std::pair<size_t, size_t>>{{2, 1}, {4, 2}, {5, 2}, {6, 3}}) {
        const FIsocrystal f = to_isocrystal(circular(r, d), Int(2));
        const auto m = f.std_lattice();
        for (long q = 1; q <= static_cast<long>(r); ++q) {
            const auto ab = alpha_beta_delta(f, q);
            const auto image = apply_map(mat_pow(f.matrix(), q), m);
            CHECK(scale_lattice(image, -ab.beta).contains(m));
            CHECK(!scale_lattice(image, -ab.beta + 1).contains(m));
            CHECK(scale_lattice(m, -ab.delta).contains(scale_lattice(image, -ab.beta)));
            CHECK(!scale_lattice(m, -ab.delta + 1).contains(scale_lattice(image, -ab.beta)));
        }
    }
}

TEST_CASE("dual alpha-beta exchange and slope laws") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 15; ++trial) {
        const size_t r = 2 + rng() % 4;
        const size_t d = 1 + rng() % (r - 1);
        const FIsocrystal f = to_isocrystal(circular(r, d), Int(2));
        const FIsocrystal fd = dual(f);
        for (long q = 1; q <= static_cast<long>(2 * r); ++q) {
            const auto ab = alpha_beta_delta(f, q);
            const auto abd = alpha_beta_delta(fd, q);
            CHECK(abd.alpha == q - ab.beta);
            CHECK(abd.beta == q - ab.alpha);
        }
        // Slope bounds: alpha(q) <= q a <= beta(q), with collapse at equality.
        const Rat a = f.newton_slopes()[0];
        for (long q = 1; q <= static_cast<long>(2 * r); ++q) {
            const auto ab = alpha_beta_delta(f, q);
            CHECK(Rat(ab.alpha) <= Rat(q) * a);
            CHECK(Rat(q) * a <= Rat(ab.beta));
            if (Rat(ab.alpha) == Rat(q) * a) CHECK(ab.delta == 0);
            if (Rat(ab.beta) == Rat(q) * a) CHECK(ab.delta == 0);
        }
        // Subadditivity.
        for (long q1 = 1; q1 <= 4; ++q1)
            for (long q2 = 1; q2 <= 4; ++q2) {
                const auto x = alpha_beta_delta(f, q1);
                const auto y = alpha_beta_delta(f, q2);
                const auto z = alpha_beta_delta(f, q1 + q2);
                CHECK(z.beta <= x.beta + y.beta);
                CHECK(z.alpha >= x.alpha + y.alpha);
            }
        // Dual slope multiset is the reflected multiset.
        auto refl = f.newton_slopes();
        for (Rat& s : refl) s = Rat(1) - s;
        std::sort(refl.begin(), refl.end());
        CHECK(fd.newton_slopes() == refl);
    }
}
