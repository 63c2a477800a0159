#include "pdiv/verify.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pdiv {

namespace {

std::string datum_str(const PermutationDatum& d) {
    std::ostringstream os;
    os << "r=" << d.r() << " pi=[";
    const auto pi = d.pi_list();
    for (size_t i = 0; i < pi.size(); ++i) os << (i ? "," : "") << pi[i];
    os << "] marked=[";
    const auto m = d.marked_list();
    for (size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
    os << "]";
    return os.str();
}

}  // namespace

std::vector<std::string> binary_necklaces(size_t length) {
    std::vector<std::string> out;
    std::string w(length, '0');
    const size_t total = size_t(1) << length;
    for (size_t bits = 0; bits < total; ++bits) {
        for (size_t k = 0; k < length; ++k) w[k] = (bits >> k) & 1 ? '1' : '0';
        if (canonical_rotation(w) == w) out.push_back(w);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

PermutationDatum datum_from_words(const std::vector<std::string>& words) {
    size_t r = 0;
    for (const std::string& w : words) r += w.size();
    std::vector<size_t> pi(r), marked;
    size_t off = 0;
    for (const std::string& w : words) {
        const size_t n = w.size();
        for (size_t k = 1; k <= n; ++k) {
            pi[off + k - 1] = off + (k % n) + 1;
            if (w[k - 1] == '1') marked.push_back(off + k);
        }
        off += n;
    }
    return PermutationDatum(r, pi, marked);
}

void multisets_rec(const std::vector<std::pair<std::string, long>>& pool, size_t from,
                   long len_left, long weight_left, std::vector<std::string>& current,
                   std::vector<PermutationDatum>& out) {
    if (len_left == 0) {
        if (weight_left == 0 && !current.empty()) out.push_back(datum_from_words(current));
        return;
    }
    for (size_t i = from; i < pool.size(); ++i) {
        const long len = static_cast<long>(pool[i].first.size());
        const long wt = pool[i].second;
        if (len > len_left || wt > weight_left) continue;
        current.push_back(pool[i].first);
        multisets_rec(pool, i, len_left - len, weight_left - wt, current, out);
        current.pop_back();
    }
}

}  // namespace

std::vector<PermutationDatum> enumerate_classes(long c, long d) {
    if (c < 0 || d < 0 || c + d < 1) throw std::invalid_argument("enumerate_classes: need c + d >= 1");
    const long r = c + d;
    std::vector<std::pair<std::string, long>> pool;  // (word, weight), sorted by (length, word)
    for (long n = 1; n <= r; ++n)
        for (const std::string& w : binary_necklaces(static_cast<size_t>(n)))
            pool.emplace_back(w, std::count(w.begin(), w.end(), '1'));
    std::vector<PermutationDatum> out;
    std::vector<std::string> current;
    multisets_rec(pool, 0, r, d, current, out);
    return out;
}

std::vector<PermutationDatum> enumerate_classes_up_to(long max_rank) {
    std::vector<PermutationDatum> out;
    for (long r = 1; r <= max_rank; ++r)
        for (long d = 0; d <= r; ++d) {
            auto part = enumerate_classes(r - d, d);
            out.insert(out.end(), part.begin(), part.end());
        }
    return out;
}

std::vector<std::string> suite_names() {
    return {"traverso",   "minimality", "sum_bound", "pair_symmetry", "duality",
            "crosscheck", "isogeny",    "monotony",  "small_torsion", "extension_bound"};
}

namespace {

using Failures = std::vector<std::string>;

void check(Failures& fails, bool ok, const std::string& what) {
    if (!ok) fails.push_back(what);
}

long min_cd(const PermutationDatum& d) {
    return std::min(static_cast<long>(d.c()), static_cast<long>(d.d()));
}

void suite_traverso(const SuiteParams& p, SuiteResult& res) {
    for (const PermutationDatum& d : enumerate_classes_up_to(p.max_rank)) {
        ++res.cases;
        const PermTorsion t = perm_level_torsion(d);
        check(res.failures, t.n == t.ell && t.ell <= min_cd(d),
              "bound n = ell <= min(c,d) fails for " + datum_str(d));
    }
}

void suite_minimality(const SuiteParams& p, SuiteResult& res) {
    for (const PermutationDatum& d : enumerate_classes_up_to(p.max_rank)) {
        ++res.cases;
        const bool small = perm_level_torsion(d).ell <= 1;
        check(res.failures, small == is_minimal(d),
              "ell <= 1 does not match minimality for " + datum_str(d));
    }
}

long cycle_torsion(const PermutationDatum& d, size_t i) {
    return perm_level_torsion(d.restrict_to_cycle(i)).ell;
}

void suite_sum_bound(const SuiteParams& p, SuiteResult& res) {
    for (const PermutationDatum& d : enumerate_classes_up_to(p.max_rank)) {
        if (d.cycles().size() < 2) continue;
        ++res.cases;
        std::vector<long> elli;
        for (size_t i = 0; i < d.cycles().size(); ++i) elli.push_back(cycle_torsion(d, i));
        long bound = 1;
        for (size_t i = 0; i < elli.size(); ++i) {
            bound = std::max(bound, elli[i]);
            for (size_t j = 0; j < elli.size(); ++j)
                if (i != j) bound = std::max(bound, elli[i] + elli[j] - 1);
        }
        check(res.failures, perm_level_torsion(d).ell <= bound,
              "multi-cycle bound fails for " + datum_str(d));
    }
    // The two-octic-cycles datum attains equality ell = ell_1 + ell_2 - 1.
    const PermutationDatum g = two_octic_cycles_datum();
    ++res.cases;
    check(res.failures,
          perm_level_torsion(g).ell == cycle_torsion(g, 0) + cycle_torsion(g, 1) - 1,
          "equality case not attained on the two-octic-cycles datum");
}

long cycle_pair_max(const PermutationDatum& d, size_t ci, size_t cj) {
    long best = 0;
    for (size_t s : d.cycles()[ci])
        for (size_t t : d.cycles()[cj]) best = std::max(best, pair_deficiency(d, s, t));
    return best;
}

void suite_pair_symmetry(const SuiteParams& p, SuiteResult& res) {
    for (const PermutationDatum& d : enumerate_classes_up_to(p.max_rank)) {
        if (d.cycles().size() < 2) continue;
        for (size_t i = 0; i < d.cycles().size(); ++i)
            for (size_t j = i + 1; j < d.cycles().size(); ++j) {
                ++res.cases;
                check(res.failures, cycle_pair_max(d, i, j) == cycle_pair_max(d, j, i),
                      "pair symmetry fails for " + datum_str(d));
            }
        // Matrix-engine spot check on two-cycle classes of small rank.
        if (d.cycles().size() == 2 && d.r() <= 6) {
            ++res.cases;
            const Int& prime = p.primes.at(0);
            const FIsocrystal f1 = to_isocrystal(d.restrict_to_cycle(0), prime);
            const FIsocrystal f2 = to_isocrystal(d.restrict_to_cycle(1), prime);
            check(res.failures, pair_level_torsion(f1, f2) == pair_level_torsion(f2, f1),
                  "matrix pair symmetry fails for " + datum_str(d));
        }
    }
}

void suite_duality(const SuiteParams& p, SuiteResult& res) {
    for (const PermutationDatum& d : enumerate_classes_up_to(p.max_rank)) {
        ++res.cases;
        const PermutationDatum dd = dual_datum(d);
        bool ok = perm_level_torsion(d).ell == perm_level_torsion(dd).ell;
        ok = ok && dual_datum(dd).marked_list() == d.marked_list();
        const auto stats = cycle_stats(d);
        const auto dstats = cycle_stats(dd);
        for (size_t i = 0; i < stats.size() && ok; ++i) {
            ok = stats[i].r2 == dstats[i].r2;
            for (long q = 1; q <= stats[i].r2 && ok; ++q) {
                ok = dstats[i].alpha[q - 1] == q - stats[i].beta[q - 1] &&
                     dstats[i].beta[q - 1] == q - stats[i].alpha[q - 1];
            }
        }
        const auto h = perm_manin_heights(d), hd = perm_manin_heights(dd);
        for (size_t i = 0; i < h.size() && ok; ++i) ok = h[i].u == hd[i].u && h[i].v == hd[i].v;
        check(res.failures, ok, "duality fails for " + datum_str(d));
        if (d.r() <= 5) {
            ++res.cases;
            const FIsocrystal f = to_isocrystal(d, p.primes.at(0));
            const FIsocrystal fd = dual(f);
            bool mok = level_torsion(f).ell == level_torsion(fd).ell;
            for (long q = 1; q <= static_cast<long>(d.r()) && mok; ++q) {
                const auto ab = alpha_beta_delta(f, q), abd = alpha_beta_delta(fd, q);
                mok = abd.alpha == q - ab.beta && abd.beta == q - ab.alpha;
            }
            check(res.failures, mok, "matrix duality fails for " + datum_str(d));
        }
    }
}

void suite_crosscheck(const SuiteParams& p, SuiteResult& res) {
    for (const PermutationDatum& d : enumerate_classes_up_to(p.max_rank)) {
        const PermTorsion pt = perm_level_torsion(d);
        const auto stats = cycle_stats(d);
        const auto heights = perm_manin_heights(d);
        std::vector<long> ref_ells;  // per prime, for p-independence
        for (const Int& prime : p.primes) {
            ++res.cases;
            const FIsocrystal f = to_isocrystal(d, prime);
            const TorsionReport mt = level_torsion(f);
            bool ok = mt.ell == pt.ell && mt.epsilon == pt.epsilon;
            for (size_t i = 0; i < d.cycles().size() && ok; ++i) {
                const FIsocrystal sub = to_isocrystal(d.restrict_to_cycle(i), prime);
                for (long q = 1; q <= stats[i].r2 && ok; ++q) {
                    const auto ab = alpha_beta_delta(sub, q);
                    ok = ab.alpha == stats[i].alpha[q - 1] && ab.beta == stats[i].beta[q - 1] &&
                         ab.delta == stats[i].delta[q - 1];
                }
                if (ok) {
                    const ManinHeights mh = manin_heights(sub);
                    ok = mh.u == heights[i].u && mh.v == heights[i].v;
                }
                if (ok) {
                    const auto period = quasi_special_period(sub);
                    ok = period.has_value() && period->r2 == stats[i].r2 &&
                         period->d2 == stats[i].d2 && period->special == stats[i].special;
                }
            }
            check(res.failures, ok,
                  "engine mismatch at p=" + prime.str() + " for " + datum_str(d));
            ref_ells.push_back(mt.ell);
        }
        check(res.failures,
              std::all_of(ref_ells.begin(), ref_ells.end(),
                          [&](long e) { return e == ref_ells.front(); }),
              "level torsion depends on p for " + datum_str(d));
    }
}

void suite_isogeny(const SuiteParams& p, SuiteResult& res) {
    std::mt19937_64 rng(p.seed);
    const Int prime = p.primes.at(0);
    const auto classes = enumerate_classes_up_to(std::min(p.max_rank, 6L));
    long accepted = 0;
    long attempts_left = 400 * std::max(p.samples, 1L);
    size_t ci = 0;
    while (accepted < p.samples && attempts_left-- > 0) {
        const PermutationDatum& d = classes[ci];
        ci = (ci + 1) % classes.size();
        const size_t r = d.r();
        const FIsocrystal f = to_isocrystal(d, prime);
        // Random unimodular transform of a p-power-scaled standard sublattice.
        std::vector<RatVec> rows(r, RatVec(r, Rat(0)));
        std::vector<std::vector<long>> u(r, std::vector<long>(r, 0));
        for (size_t i = 0; i < r; ++i) u[i][i] = 1;
        const size_t shears = 2 * r;
        for (size_t k = 0; k < shears; ++k) {
            const size_t i = rng() % r, j = rng() % r;
            if (i == j) continue;
            const long cmul = (rng() % 2) ? 1 : -1;
            for (size_t col = 0; col < r; ++col) u[i][col] += cmul * u[j][col];
        }
        std::uniform_int_distribution<long> exp_dist(0, 2);
        for (size_t i = 0; i < r; ++i) {
            const Rat s = pow_p(prime, exp_dist(rng));
            for (size_t col = 0; col < r; ++col) rows[i][col] = s * Rat(u[i][col]);
        }
        const EchelonLattice sub = hnf_basis(prime, r, rows);
        const EchelonLattice image = apply_map(f.matrix(), sub);
        if (!sub.contains(image)) continue;
        if (!image.contains(scale_lattice(sub, 1))) continue;  // keep the quotient Dieudonne
        ++accepted;
        ++res.cases;
        const auto [kappa, quotient] = isogeny_kappa(f, sub);
        const long ell_d = level_torsion(f).ell;
        const long ell_q = level_torsion(quotient).ell;
        check(res.failures, ell_d <= ell_q + 2 * kappa,
              "isogeny bound fails (kappa=" + std::to_string(kappa) + ") for " + datum_str(d));
    }
    check(res.failures, accepted >= p.samples, "sampler exhausted before reaching sample target");
    // Height bound sweep on the isoclinic classes.
    for (const PermutationDatum& d : classes) {
        const FIsocrystal f = to_isocrystal(d, prime);
        if (!f.isoclinic()) continue;
        ++res.cases;
        const ManinHeights h = manin_heights(f);
        const long ell = level_torsion(f).ell;
        // Restricted crystal on the stabilized special sublattice.
        const Rat slope = f.newton_slopes()[0];
        const long d1 = static_cast<long>(numerator(slope));
        const long r1 = static_cast<long>(denominator(slope));
        const EchelonLattice m0 = stabilized_meet_chain(
            f.std_lattice(), pow_p(prime, -d1) * mat_pow(f.matrix(), r1));
        const auto [kappa0, f0] = isogeny_kappa(f, m0);
        const long j = level_torsion(f0).ell;
        bool ok = kappa0 == h.u && h.u <= ell && ell <= j + 2 * h.u;
        check(res.failures, ok, "height bound fails for " + datum_str(d));
    }
}

void suite_monotony(const SuiteParams& p, SuiteResult& res) {
    for (const PermutationDatum& d : enumerate_classes_up_to(std::min(p.max_rank, 5L))) {
        const Int& prime = p.primes.at(0);
        const FIsocrystal f = to_isocrystal(d, prime);
        const long ell_gl = level_torsion(f).ell;
        const size_t r = d.r();
        // Scalars.
        ++res.cases;
        const TorsionReport sc = subalgebra_level_torsion(f, {RatMat::identity(r)});
        check(res.failures, sc.ell == 0 && sc.ell <= ell_gl,
              "scalar subalgebra torsion fails for " + datum_str(d));
        const auto blocks = f.effective_splitting();
        if (blocks.size() < 2) continue;
        // Supports of the splitting blocks (unit-vector bases).
        std::vector<std::vector<size_t>> supports;
        for (const SlopeBlock& b : blocks) {
            std::vector<size_t> sup;
            for (const RatVec& v : b.basis)
                for (size_t i = 0; i < r; ++i)
                    if (v[i] != 0) sup.push_back(i);
            supports.push_back(std::move(sup));
        }
        const auto unit = [&](size_t a, size_t b) {
            RatMat m(r, r);
            m.at(a, b) = 1;
            return m;
        };
        // Centralizer of the splitting: block-diagonal maps.
        std::vector<RatMat> centr;
        for (const auto& sup : supports)
            for (size_t a : sup)
                for (size_t b : sup) centr.push_back(unit(a, b));
        ++res.cases;
        const TorsionReport ct = subalgebra_level_torsion(f, centr);
        check(res.failures, ct.ell <= ell_gl, "centralizer monotony fails for " + datum_str(d));
        // Parabolic stabilizing the ascending-slope flag.
        std::vector<RatMat> parab;
        for (size_t bi = 0; bi < supports.size(); ++bi)
            for (size_t bj = bi; bj < supports.size(); ++bj)
                for (size_t a : supports[bi])
                    for (size_t b : supports[bj]) parab.push_back(unit(a, b));
        ++res.cases;
        const TorsionReport pt = subalgebra_level_torsion(f, parab);
        check(res.failures, pt.ell <= ell_gl, "parabolic monotony fails for " + datum_str(d));
    }
}

void suite_small_torsion(const SuiteParams& p, SuiteResult& res) {
    for (const PermutationDatum& d : enumerate_classes_up_to(p.max_rank)) {
        const PermTorsion pt = perm_level_torsion(d);
        if (pt.ell > 2) continue;
        ++res.cases;
        const FIsocrystal f = to_isocrystal(d, p.primes.at(0));
        bool ok = level_torsion(f).ell == pt.ell;
        if (pt.ell <= 1) ok = ok && is_minimal(d);
        if (pt.ell == 2) ok = ok && !is_minimal(d);
        check(res.failures, ok, "small-torsion consistency fails for " + datum_str(d));
    }
}

void suite_extension_bound(const SuiteParams& p, SuiteResult& res) {
    for (const Int& prime : p.primes)
        for (long d : {3L, 4L})
            for (const Rat& gamma : {Rat(1), Rat(1) + Rat(prime)}) {
                ++res.cases;
                const FIsocrystal f = extension_crystal(prime, d, gamma);
                std::vector<Rat> want(static_cast<size_t>(d), Rat(1, d));
                want.insert(want.end(), static_cast<size_t>(d), Rat(d - 1, d));
                std::sort(want.begin(), want.end());
                bool ok = f.dieudonne() && f.newton_slopes() == want;
                ok = ok && level_torsion(f).ell <= 2;
                check(res.failures, ok,
                      "extension bound fails at p=" + prime.str() + " d=" + std::to_string(d) +
                          " gamma=" + rat_str(gamma));
            }
}

}  // namespace

PermutationDatum two_octic_cycles_datum() {
    std::vector<size_t> pi(16);
    const auto set = [&](size_t s, size_t img) { pi[s - 1] = img; };
    set(9, 10); set(10, 5); set(5, 11); set(11, 12); set(12, 6); set(6, 7); set(7, 8); set(8, 9);
    set(1, 2); set(2, 13); set(13, 3); set(3, 4); set(4, 14); set(14, 15); set(15, 16); set(16, 1);
    return PermutationDatum(16, pi, {1, 2, 3, 4, 5, 6, 7, 8});
}

SuiteResult run_suite(const std::string& name, const SuiteParams& params) {
    SuiteResult res;
    res.suite = name;
    {
        std::ostringstream os;
        os << "max_rank=" << params.max_rank << " primes=";
        for (size_t i = 0; i < params.primes.size(); ++i)
            os << (i ? "," : "") << params.primes[i].str();
        os << " seed=" << params.seed << " samples=" << params.samples;
        res.params = os.str();
    }
    const auto start = std::chrono::steady_clock::now();
    if (name == "traverso")
        suite_traverso(params, res);
    else if (name == "minimality")
        suite_minimality(params, res);
    else if (name == "sum_bound")
        suite_sum_bound(params, res);
    else if (name == "pair_symmetry")
        suite_pair_symmetry(params, res);
    else if (name == "duality")
        suite_duality(params, res);
    else if (name == "crosscheck")
        suite_crosscheck(params, res);
    else if (name == "isogeny")
        suite_isogeny(params, res);
    else if (name == "monotony")
        suite_monotony(params, res);
    else if (name == "small_torsion")
        suite_small_torsion(params, res);
    else if (name == "extension_bound")
        suite_extension_bound(params, res);
    else
        throw std::invalid_argument("unknown suite: " + name);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace pdiv
