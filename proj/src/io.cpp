#include "pdiv/io.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace pdiv {

std::string dump_json(const Json& j) { return j.dump(2); }

PermutationDatum datum_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("r") || !j.contains("pi") || !j.contains("marked"))
        throw std::invalid_argument("datum: expected {r, pi, marked}");
    const size_t r = j.at("r").get<size_t>();
    std::vector<size_t> pi, marked;
    for (const Json& e : j.at("pi")) pi.push_back(e.get<size_t>());
    for (const Json& e : j.at("marked")) marked.push_back(e.get<size_t>());
    return PermutationDatum(r, pi, marked);
}

Json datum_to_json(const PermutationDatum& d) {
    Json j;
    j["r"] = d.r();
    j["pi"] = d.pi_list();
    j["marked"] = d.marked_list();
    return j;
}

FIsocrystal crystal_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("p") || !j.contains("rank") || !j.contains("matrix"))
        throw std::invalid_argument("crystal: expected {p, rank, matrix, ...}");
    const Int p(j.at("p").get<std::string>());
    const size_t rank = j.at("rank").get<size_t>();
    const Json& m = j.at("matrix");
    if (m.size() != rank) throw std::invalid_argument("crystal: matrix row count mismatch");
    RatMat a(rank, rank);
    for (size_t i = 0; i < rank; ++i) {
        if (m.at(i).size() != rank) throw std::invalid_argument("crystal: matrix column mismatch");
        for (size_t jj = 0; jj < rank; ++jj)
            a.at(i, jj) = parse_rat(m.at(i).at(jj).get<std::string>());
    }
    std::optional<std::vector<SlopeBlock>> split;
    if (j.contains("splitting") && !j.at("splitting").is_null()) {
        std::vector<SlopeBlock> blocks;
        for (const Json& bj : j.at("splitting")) {
            SlopeBlock b;
            b.slope = parse_rat(bj.at("slope").get<std::string>());
            for (const Json& vj : bj.at("basis")) {
                RatVec v;
                for (const Json& e : vj) v.push_back(parse_rat(e.get<std::string>()));
                b.basis.push_back(std::move(v));
            }
            blocks.push_back(std::move(b));
        }
        split = std::move(blocks);
    }
    FIsocrystal f(p, std::move(a), std::move(split));
    if (j.contains("dieudonne") && j.at("dieudonne").get<bool>() != f.dieudonne())
        throw std::invalid_argument("crystal: declared dieudonne flag contradicts the matrix");
    return f;
}

namespace {

Json mat_json(const RatMat& m) {
    Json rows = Json::array();
    for (size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (size_t j = 0; j < m.cols(); ++j) row.push_back(rat_str(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vec_json(const RatVec& v) {
    Json row = Json::array();
    for (const Rat& e : v) row.push_back(rat_str(e));
    return row;
}

Json slopes_json(const std::vector<Rat>& slopes) {
    Json out = Json::array();
    for (const Rat& s : slopes) out.push_back(rat_str(s));
    return out;
}

}  // namespace

Json crystal_to_json(const FIsocrystal& f) {
    Json j;
    j["p"] = f.prime().str();
    j["rank"] = f.rank();
    j["matrix"] = mat_json(f.matrix());
    if (f.splitting()) {
        Json blocks = Json::array();
        for (const SlopeBlock& b : *f.splitting()) {
            Json bj;
            bj["slope"] = rat_str(b.slope);
            Json basis = Json::array();
            for (const RatVec& v : b.basis) basis.push_back(vec_json(v));
            bj["basis"] = std::move(basis);
            blocks.push_back(std::move(bj));
        }
        j["splitting"] = std::move(blocks);
    }
    j["dieudonne"] = f.dieudonne();
    return j;
}

EchelonLattice lattice_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("p") || !j.contains("ambient") || !j.contains("basis"))
        throw std::invalid_argument("lattice: expected {p, ambient, basis}");
    const Int p(j.at("p").get<std::string>());
    const size_t ambient = j.at("ambient").get<size_t>();
    std::vector<RatVec> gens;
    for (const Json& vj : j.at("basis")) {
        RatVec v;
        for (const Json& e : vj) v.push_back(parse_rat(e.get<std::string>()));
        gens.push_back(std::move(v));
    }
    return hnf_basis(p, ambient, gens);
}

Json lattice_to_json(const EchelonLattice& l) {
    Json j;
    j["p"] = l.prime().str();
    j["ambient"] = l.ambient();
    Json basis = Json::array();
    for (const RatVec& v : l.basis()) basis.push_back(vec_json(v));
    j["basis"] = std::move(basis);
    return j;
}

Json suite_to_json(const SuiteResult& r) {
    Json j;
    j["suite"] = r.suite;
    j["params"] = r.params;
    j["cases"] = r.cases;
    j["failures"] = r.failures;
    j["seconds"] = r.seconds;
    return j;
}

std::string suite_to_csv(const SuiteResult& r) {
    std::ostringstream os;
    os << "suite,params,cases,failures,seconds\n";
    os << r.suite << ",\"" << r.params << "\"," << r.cases << "," << r.failures.size() << ","
       << r.seconds << "\n";
    return os.str();
}

namespace {

struct Provenance {
    Json map = Json::object();
    void tag(const std::string& field, const std::string& engine) { map[field] = engine; }
};

Json lists_json(const std::vector<long>& v) {
    Json out = Json::array();
    for (long x : v) out.push_back(x);
    return out;
}

/* Matrix-engine per-block facts for a crystal; window is the block's
 * quasi-special period when one exists, else the override. */
Json matrix_block_json(const FIsocrystal& sub, std::optional<long> window_override,
                       bool& exact_window) {
    Json b;
    const HodgeNewtonProfile prof = classify(sub);
    b["r"] = sub.rank();
    b["c"] = prof.c;
    b["d"] = prof.d;
    b["slope"] = rat_str(sub.newton_slopes().at(0));
    const auto period = quasi_special_period(sub);
    long window;
    if (period) {
        b["period"] = Json{{"r", period->r2}, {"d", period->d2}, {"special", period->special}};
        window = period->r2;
        b["quasi_special"] = true;
    } else {
        b["period"] = nullptr;
        b["quasi_special"] = false;
        window = window_override.value_or(static_cast<long>(sub.rank()));
        exact_window = false;
    }
    std::vector<long> alpha, beta, delta;
    for (long q = 1; q <= window; ++q) {
        const auto ab = alpha_beta_delta(sub, q);
        alpha.push_back(ab.alpha);
        beta.push_back(ab.beta);
        delta.push_back(ab.delta);
    }
    b["window"] = window;
    b["alpha"] = lists_json(alpha);
    b["beta"] = lists_json(beta);
    b["delta"] = lists_json(delta);
    const ManinHeights h = manin_heights(sub);
    b["u"] = h.u;
    b["v"] = h.v;
    b["ell"] = level_torsion(sub).ell;
    return b;
}

}  // namespace

InvariantReport report_for_datum(const PermutationDatum& d, const Int& p) {
    Json j;
    Provenance prov;
    j["kind"] = "datum";
    j["input"] = datum_to_json(d);
    j["p"] = p.str();
    j["rank"] = d.r();

    const FIsocrystal f = to_isocrystal(d, p);
    const HodgeNewtonProfile prof = classify(f);
    if (prof.c != d.c() || prof.d != d.d()) throw std::logic_error("engine mismatch: (c, d)");
    j["c"] = d.c();
    j["d"] = d.d();
    prov.tag("c", "both-agree");
    prov.tag("d", "both-agree");
    j["slopes"] = slopes_json(prof.slopes);
    prov.tag("slopes", "matrix");
    j["dieudonne"] = f.dieudonne();
    j["isoclinic"] = prof.isoclinic;
    j["ordinary"] = prof.ordinary;
    j["quasi_special"] = true;  // every permutation datum is quasi-special
    j["minimal"] = is_minimal(d);
    j["special"] = is_special(d);
    prov.tag("minimal", "perm");
    prov.tag("special", "perm");
    j["necklace_class"] = necklace_class(d).words;
    prov.tag("necklace_class", "perm");

    const PermTorsion pt = perm_level_torsion(d);
    const TorsionReport mt = level_torsion(f, /*with_pair_torsions=*/true);
    if (pt.ell != mt.ell || pt.epsilon != mt.epsilon)
        throw std::logic_error("engine mismatch: level torsion");
    if (prof.isoclinic) {
        // The fixed-element span splits along the cycles, so the heights
        // of the whole crystal are the per-cycle maxima.
        const ManinHeights mh = manin_heights(f);
        long pu = 0, pv = 0;
        for (const CycleHeights& ch : perm_manin_heights(d)) {
            pu = std::max(pu, ch.u);
            pv = std::max(pv, ch.v);
        }
        if (mh.u != pu || mh.v != pv) throw std::logic_error("engine mismatch: heights");
        j["u"] = mh.u;
        j["v"] = mh.v;
        prov.tag("u", "both-agree");
        prov.tag("v", "both-agree");
    }
    j["ell"] = pt.ell;
    j["epsilon"] = pt.epsilon;
    j["rule"] = std::string(1, mt.rule);
    if (mt.rule_a_beyond_ordinary) j["rule_a_beyond_ordinary"] = true;
    j["n"] = pt.n;
    j["n_justification"] = "quasi-special, hence a direct sum of isoclinics";
    prov.tag("ell", "both-agree");
    prov.tag("epsilon", "both-agree");
    prov.tag("n", "both-agree");

    // Per-cycle stats from the permutation engine, heights cross-checked.
    const auto stats = cycle_stats(d);
    const auto heights = perm_manin_heights(d);
    Json blocks = Json::array();
    for (size_t i = 0; i < stats.size(); ++i) {
        const CycleStats& st = stats[i];
        Json b;
        b["kind"] = "cycle";
        b["support"] = st.support;
        b["r"] = st.r_i;
        b["c"] = st.c_i;
        b["d"] = st.d_i;
        b["slope"] = rat_str(st.slope);
        b["period"] = Json{{"r", st.r2}, {"d", st.d2}, {"special", st.special}};
        b["window"] = st.r2;
        b["alpha"] = lists_json(st.alpha);
        b["beta"] = lists_json(st.beta);
        b["delta"] = lists_json(st.delta);
        b["u"] = heights[i].u;
        b["v"] = heights[i].v;
        b["ell"] = perm_level_torsion(d.restrict_to_cycle(i)).ell;
        b["word"] = st.word;
        blocks.push_back(std::move(b));
    }
    j["blocks"] = std::move(blocks);
    prov.tag("blocks", "perm");

    if (mt.has_pair_torsions) {
        Json ptj = Json::array();
        for (const auto& row : mt.pair_torsions) ptj.push_back(lists_json(row));
        j["pair_torsions"] = std::move(ptj);
        Json labels = Json::array();
        for (const SlopeBlock& b : f.effective_splitting()) labels.push_back(rat_str(b.slope));
        j["pair_torsion_slopes"] = std::move(labels);
        prov.tag("pair_torsions", "matrix");
    }
    j["window_semantics"] = "exact";
    j["engines"] = prov.map;
    return InvariantReport{std::move(j)};
}

InvariantReport report_for_crystal(const FIsocrystal& f, std::optional<long> window_override) {
    Json j;
    Provenance prov;
    j["kind"] = "crystal";
    j["input"] = crystal_to_json(f);
    j["p"] = f.prime().str();
    j["rank"] = f.rank();
    const HodgeNewtonProfile prof = classify(f);
    j["c"] = prof.c;
    j["d"] = prof.d;
    j["slopes"] = slopes_json(prof.slopes);
    j["dieudonne"] = prof.dieudonne;
    j["isoclinic"] = prof.isoclinic;
    j["ordinary"] = prof.ordinary;
    for (const char* field : {"c", "d", "slopes"}) prov.tag(field, "matrix");

    const TorsionReport mt = level_torsion(f, /*with_pair_torsions=*/true);
    j["ell"] = mt.ell;
    j["epsilon"] = mt.epsilon;
    j["rule"] = std::string(1, mt.rule);
    if (mt.rule_a_beyond_ordinary) j["rule_a_beyond_ordinary"] = true;
    prov.tag("ell", "matrix");
    prov.tag("epsilon", "matrix");
    if (prof.isoclinic && f.rank() > 0) {
        const ManinHeights mh = manin_heights(f);
        j["u"] = mh.u;
        j["v"] = mh.v;
        prov.tag("u", "matrix");
        prov.tag("v", "matrix");
    }
    if (f.has_effective_splitting()) {
        j["n"] = mt.ell;
        j["n_justification"] = "direct sum of isoclinics";
        prov.tag("n", "matrix");
    }

    bool exact_window = true;
    Json blocks = Json::array();
    const auto split = f.has_effective_splitting() ? f.effective_splitting()
                                                   : std::vector<SlopeBlock>{};
    bool quasi_special = f.has_effective_splitting();
    for (size_t i = 0; i < split.size(); ++i) {
        const FIsocrystal sub = block_crystal(f, i);
        Json b = matrix_block_json(sub, window_override, exact_window);
        if (!b["quasi_special"].get<bool>()) quasi_special = false;
        b["kind"] = "block";
        blocks.push_back(std::move(b));
    }
    j["quasi_special"] = quasi_special;
    j["blocks"] = std::move(blocks);
    prov.tag("blocks", "matrix");
    if (mt.has_pair_torsions) {
        Json ptj = Json::array();
        for (const auto& row : mt.pair_torsions) ptj.push_back(lists_json(row));
        j["pair_torsions"] = std::move(ptj);
        Json labels = Json::array();
        for (const SlopeBlock& b : split) labels.push_back(rat_str(b.slope));
        j["pair_torsion_slopes"] = std::move(labels);
        prov.tag("pair_torsions", "matrix");
    }
    j["window_semantics"] = exact_window ? "exact" : "lower-bound";
    j["engines"] = prov.map;
    return InvariantReport{std::move(j)};
}

namespace {

void flatten(const Json& j, const std::string& prefix, const Json& engines,
             std::vector<std::array<std::string, 3>>& rows) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (prefix.empty() && (it.key() == "engines" || it.key() == "input")) continue;
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), engines, rows);
        }
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i)
            flatten(j.at(i), prefix + "[" + std::to_string(i) + "]", engines, rows);
    } else {
        std::string engine = "";
        const std::string head = prefix.substr(0, prefix.find_first_of(".["));
        if (engines.contains(head)) engine = engines.at(head).get<std::string>();
        std::string value = j.is_string() ? j.get<std::string>() : j.dump();
        rows.push_back({prefix, value, engine});
    }
}

}  // namespace

std::string InvariantReport::csv() const {
    std::vector<std::array<std::string, 3>> rows;
    flatten(body, "", body.contains("engines") ? body.at("engines") : Json::object(), rows);
    std::ostringstream os;
    os << "field,value,engine\n";
    for (const auto& r : rows) os << r[0] << ",\"" << r[1] << "\"," << r[2] << "\n";
    return os.str();
}

std::string InvariantReport::table() const {
    std::vector<std::array<std::string, 3>> rows;
    flatten(body, "", body.contains("engines") ? body.at("engines") : Json::object(), rows);
    size_t w = 0;
    for (const auto& r : rows) w = std::max(w, r[0].size());
    std::ostringstream os;
    for (const auto& r : rows) {
        os << r[0] << std::string(w - r[0].size() + 2, ' ') << r[1];
        if (!r[2].empty()) os << "  [" << r[2] << "]";
        os << "\n";
    }
    return os.str();
}

}  // namespace pdiv
