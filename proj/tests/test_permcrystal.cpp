#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdiv/levelmod.hpp"
#include "pdiv/permcrystal.hpp"
#include "pdiv/verify.hpp"

#include <random>

using namespace pdiv;

namespace {

PermutationDatum circular(size_t r, size_t d) {
    std::vector<size_t> pi(r), marked;
    for (size_t s = 1; s <= r; ++s) pi[s - 1] = s % r + 1;
    for (size_t s = 1; s <= d; ++s) marked.push_back(s);
    return PermutationDatum(r, pi, marked);
}

PermutationDatum transposition_datum() { return PermutationDatum(2, {2, 1}, {1}); }

/* Conjugate the datum by a permutation sigma of {1..r}. */
PermutationDatum relabel(const PermutationDatum& d, const std::vector<size_t>& sigma) {
    std::vector<size_t> pi(d.r()), marked;
    for (size_t s = 1; s <= d.r(); ++s) pi[sigma[s - 1] - 1] = sigma[d.image(s) - 1];
    for (size_t s = 1; s <= d.r(); ++s)
        if (d.marked(s)) marked.push_back(sigma[s - 1]);
    return PermutationDatum(d.r(), pi, marked);
}

std::vector<size_t> random_sigma(std::mt19937_64& rng, size_t r) {
    std::vector<size_t> sigma(r);
    for (size_t i = 0; i < r; ++i) sigma[i] = i + 1;
    std::shuffle(sigma.begin(), sigma.end(), rng);
    return sigma;
}

}  // namespace

TEST_CASE("datum validation") {
    const auto t = transposition_datum();
    CHECK(t.c() == 1);
    CHECK(t.d() == 1);
    CHECK(two_octic_cycles_datum().cycles().size() == 2);
    CHECK_THROWS_AS(PermutationDatum(2, {1, 1}, {}), std::invalid_argument);
    CHECK_THROWS_AS(PermutationDatum(2, {1, 2}, {3}), std::invalid_argument);
    CHECK_THROWS_AS(PermutationDatum(2, {1}, {}), std::invalid_argument);
}

TEST_CASE("eta tables") {
    const auto g = two_octic_cycles_datum();
    const std::vector<long> eta9{0, 0, 1, 1, 1, 2, 3, 4};
    const std::vector<long> eta1{1, 2, 2, 3, 4, 4, 4, 4};
    for (long q = 1; q <= 8; ++q) {
        CHECK(eta(g, q, 9) == eta9[q - 1]);
        CHECK(eta(g, q, 1) == eta1[q - 1]);
    }
    const auto full = PermutationDatum(3, {2, 3, 1}, {1, 2, 3});
    for (long q = 1; q <= 7; ++q) CHECK(eta(full, q, 2) == q);

    // Cocycle law eta_{a+b}(s) = eta_a(s) + eta_b(pi^a(s)).
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const long a = 1 + rng() % 6, b = 1 + rng() % 6;
        const size_t s = 1 + rng() % g.r();
        size_t t = s;
        for (long i = 0; i < a; ++i) t = g.image(t);
        CHECK(eta(g, a + b, s) == eta(g, a, s) + eta(g, b, t));
    }
}

TEST_CASE("cycle stats") {
    const auto g = two_octic_cycles_datum();
    const auto stats = cycle_stats(g);
    REQUIRE(stats.size() == 2);
    // Cycles are listed by smallest element: cycle 0 contains 1.
    CHECK(stats[0].support == std::vector<size_t>{1, 2, 3, 4, 13, 14, 15, 16});
    CHECK(stats[1].support == std::vector<size_t>{5, 6, 7, 8, 9, 10, 11, 12});
    for (const auto& st : stats) {
        CHECK(st.r_i == 8);
        CHECK(st.d_i == 4);
        CHECK(st.slope == Rat(1, 2));
        CHECK(st.r2 == 8);
        CHECK(st.d2 == 4);
        CHECK(!st.special);
    }
    CHECK(stats[1].delta == std::vector<long>{1, 2, 2, 2, 2, 2, 1, 0});

    for (size_t d = 1; d <= 3; ++d) {
        const auto st = cycle_stats(circular(2 * d, d))[0];
        CHECK(st.alpha[d - 1] == 0);
        CHECK(st.beta[d - 1] == static_cast<long>(d));
    }
    const auto pure = cycle_stats(PermutationDatum(3, {2, 3, 1}, {1, 2, 3}))[0];
    CHECK(pure.special);
    CHECK(pure.r2 == 1);
    CHECK(pure.alpha == std::vector<long>{1});
    CHECK(pure.beta == std::vector<long>{1});
}

TEST_CASE("pair deficiencies") {
    const auto g = two_octic_cycles_datum();
    CHECK(pair_deficiency(g, 9, 1) == 3);
    CHECK(pair_deficiency(g, 1, 9) == 3);
    CHECK(pair_deficiency(g, 9, 9) == 0);
    CHECK(pair_deficiency(transposition_datum(), 1, 2) == 1);
}

TEST_CASE("level torsion from the permutation") {
    CHECK(perm_level_torsion(two_octic_cycles_datum()).ell == 3);
    CHECK(perm_level_torsion(two_octic_cycles_datum()).n == 3);
    for (size_t d = 1; d <= 6; ++d) {
        const auto t = perm_level_torsion(circular(2 * d, d));
        CHECK(t.ell == static_cast<long>(d));
        CHECK(t.n == static_cast<long>(d));
    }
    CHECK(perm_level_torsion(PermutationDatum(3, {2, 3, 1}, {})).ell == 0);
    CHECK(perm_level_torsion(PermutationDatum(3, {2, 3, 1}, {1, 2, 3})).ell == 0);
    // Ordinary: pure cycles of both kinds.
    const PermutationDatum ord(3, {2, 1, 3}, {3});
    const auto t = perm_level_torsion(ord);
    CHECK(t.ell == 1);
    CHECK(t.epsilon == 1);
    CHECK(t.rule == 'a');
}

TEST_CASE("minimality and specialness") {
    CHECK(is_minimal(transposition_datum()));
    CHECK(is_minimal(circular(2, 1)));
    for (size_t d = 2; d <= 5; ++d) CHECK(!is_minimal(circular(2 * d, d)));
    CHECK(is_minimal(PermutationDatum(3, {2, 3, 1}, {})));
    CHECK(is_special(circular(2, 1)));
    CHECK(!is_special(circular(4, 2)));
}

TEST_CASE("necklace classes") {
    const auto g = two_octic_cycles_datum();
    const auto cls = necklace_class(g);
    REQUIRE(cls.words.size() == 2);
    CHECK(cls.words[0] == "00011011");
    CHECK(cls.words[1] == "00100111");
    CHECK(cls.words[0] != cls.words[1]);
    for (const auto& w : cls.words)
        CHECK(std::count(w.begin(), w.end(), '1') == 4);

    // Invariance under relabeling.
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto sigma = random_sigma(rng, g.r());
        CHECK(necklace_class(relabel(g, sigma)) == cls);
    }
    CHECK(canonical_rotation("110") == "011");
    CHECK(canonical_rotation("0101") == "0101");
}

TEST_CASE("dual datum") {
    const auto t = transposition_datum();
    const auto td = dual_datum(t);
    CHECK(td.marked_list() == std::vector<size_t>{2});
    CHECK(perm_level_torsion(td).ell == 1);
    CHECK(dual_datum(td).marked_list() == t.marked_list());
    for (size_t d = 1; d <= 4; ++d)
        CHECK(perm_level_torsion(dual_datum(circular(2 * d, d))).ell ==
              perm_level_torsion(circular(2 * d, d)).ell);
}

TEST_CASE("matrix bridge") {
    const FIsocrystal f = to_isocrystal(transposition_datum(), Int(2));
    RatMat want(2, 2);
    want.at(0, 1) = 1;
    want.at(1, 0) = 2;
    CHECK(f.matrix() == want);
    CHECK(f.dieudonne());

    const FIsocrystal etale = to_isocrystal(PermutationDatum(3, {2, 3, 1}, {}), Int(3));
    CHECK(classify(etale).d == 0);
    CHECK(level_torsion(etale).ell == 0);
}

TEST_CASE("per-cycle heights") {
    CHECK(perm_manin_heights(circular(2, 1))[0].u == 0);
    CHECK(perm_manin_heights(circular(2, 1))[0].v == 0);
    const auto h = perm_manin_heights(circular(4, 2));
    CHECK(h[0].u == 1);
    CHECK(h[0].v == 0);
    const auto pure = perm_manin_heights(PermutationDatum(3, {2, 3, 1}, {1, 2, 3}));
    CHECK(pure[0].u == 0);
}

TEST_CASE("zero-drift symmetry of the two deficiency directions") {
    // For equal slopes the forward and backward sups agree per
    // orientation, and the pair number is orientation-symmetric.
    const auto g = two_octic_cycles_datum();
    for (size_t s = 1; s <= g.r(); ++s)
        for (size_t t = 1; t <= g.r(); ++t) {
            long fwd = 0, back = 0;
            {
                long hs = 0, ht = 0;
                size_t xs = s, xt = t;
                for (long q = 1; q <= 72; ++q) {
                    if (g.marked(xs)) ++hs;
                    if (g.marked(xt)) ++ht;
                    xs = g.image(xs);
                    xt = g.image(xt);
                    fwd = std::max(fwd, ht - hs);
                }
            }
            {
                long hs = 0, ht = 0;
                size_t xs = s, xt = t;
                for (long q = 1; q <= 72; ++q) {
                    xs = g.preimage(xs);
                    xt = g.preimage(xt);
                    if (g.marked(xs)) ++hs;
                    if (g.marked(xt)) ++ht;
                    back = std::max(back, hs - ht);
                }
            }
            CHECK(fwd == back);
            CHECK(pair_deficiency(g, s, t) == pair_deficiency(g, t, s));
        }
}

TEST_CASE("closed-formula cross-check over the full order window") {
    // The order-window formulas agree with the defining integrality sups.
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 25; ++trial) {
        const size_t r = 2 + rng() % 6;
        std::vector<size_t> sigma = random_sigma(rng, r);
        std::vector<size_t> marked;
        for (size_t s = 1; s <= r; ++s)
            if (rng() % 2) marked.push_back(s);
        const PermutationDatum d(r, sigma, marked);
        long order = 1;
        for (const auto& cyc : d.cycles()) order = std::lcm<long>(order, cyc.size());
        for (size_t s = 1; s <= r; ++s)
            for (size_t t = 1; t <= r; ++t) {
                const long es = eta(d, order, s), et = eta(d, order, t);
                long formula = 0;
                if (es > et) {
                    for (long q = 1; q <= order; ++q)
                        formula = std::max(formula, eta(d, q, t) - eta(d, q, s));
                } else if (es < et) {
                    for (long q = 1; q <= order; ++q)
                        formula = std::max(formula, eta(d, q, s) - eta(d, q, t));
                } else {
                    for (long q = 1; q <= order; ++q)
                        formula = std::max(formula, std::abs(eta(d, q, s) - eta(d, q, t)));
                }
                CHECK(pair_deficiency(d, s, t) == formula);
            }
    }
}

TEST_CASE("engine equivalence on small data across primes") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 12; ++trial) {
        const size_t r = 2 + rng() % 4;
        std::vector<size_t> sigma = random_sigma(rng, r);
        std::vector<size_t> marked;
        for (size_t s = 1; s <= r; ++s)
            if (rng() % 2) marked.push_back(s);
        const PermutationDatum d(r, sigma, marked);
        const PermTorsion pt = perm_level_torsion(d);
        for (long p : {2L, 3L, 5L}) {
            const FIsocrystal f = to_isocrystal(d, Int(p));
            CHECK(level_torsion(f).ell == pt.ell);
        }
    }
}
