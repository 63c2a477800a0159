/* Command-line front end: invariant reports, class enumeration, suite
 * runs and the extension builder. Exit codes: 0 success, 1 validation
 * error, 2 suite failure. */

#include "pdiv/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace pdiv;

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

std::string format_suite(const SuiteResult& r, const std::string& format) {
    if (format == "json") return dump_json(suite_to_json(r)) + "\n";
    if (format == "csv") return suite_to_csv(r);
    std::ostringstream os;
    os << "suite " << r.suite << " (" << r.params << "): " << r.cases << " cases, "
       << r.failures.size() << " failures, " << r.seconds << " s\n";
    for (const std::string& f : r.failures) os << "  FAIL " << f << "\n";
    return os.str();
}

std::string format_report(const InvariantReport& rep, const std::string& format) {
    if (format == "json") return rep.str();
    if (format == "csv") return rep.csv();
    return rep.table();
}

int suite_exit(const SuiteResult& r) { return r.failures.empty() ? 0 : 2; }

std::vector<Int> parse_primes(const std::vector<long>& raw) {
    std::vector<Int> out;
    for (long p : raw) out.push_back(Int(p));
    if (out.empty()) out.push_back(Int(2));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact invariants of p-divisible groups and latticed F-isocrystals"};
    app.require_subcommand(1);

    std::string format = "table";
    const auto add_format = [&format](CLI::App* sub) {
        sub->add_option("--format", format, "Output format")
            ->check(CLI::IsMember({"json", "csv", "table"}));
    };

    // invariants
    auto* inv = app.add_subcommand("invariants", "Invariant report for one datum or crystal");
    std::string datum_path, crystal_path;
    long prime = 2;
    long window_override = 0;
    inv->add_option("--datum", datum_path, "Permutation datum JSON file");
    inv->add_option("--crystal", crystal_path, "Crystal JSON file");
    inv->add_option("--prime", prime, "Prime for the matrix engine (datum input)");
    inv->add_option("--window-override", window_override,
                    "Table window for crystals without a quasi-special period "
                    "(output is then flagged lower-bound)");
    add_format(inv);

    // enumerate
    auto* enumr = app.add_subcommand("enumerate", "List necklace classes for (c, d)");
    long ec = 0, ed = 0;
    enumr->add_option("c", ec, "codimension")->required();
    enumr->add_option("d", ed, "dimension")->required();
    add_format(enumr);

    // verify
    auto* ver = app.add_subcommand("verify", "Run a verification suite");
    std::string suite;
    long max_rank = 8;
    unsigned long long seed = 0;
    long samples = 100;
    std::vector<long> primes_raw;
    ver->add_option("suite", suite, "Suite name")->required();
    ver->add_option("--max-rank", max_rank, "Largest total rank to sweep");
    ver->add_option("--seed", seed, "Sampling seed");
    ver->add_option("--samples", samples, "Sample count for sampled suites");
    ver->add_option("--prime", primes_raw, "Primes (repeatable)");
    add_format(ver);

    // extension
    auto* ext = app.add_subcommand("extension", "Build the rank-2d extension crystal");
    long ext_p = 2, ext_d = 3;
    std::string ext_gamma = "1";
    ext->add_option("--p", ext_p, "Prime")->required();
    ext->add_option("--d", ext_d, "Half rank (>= 3)")->required();
    ext->add_option("--gamma", ext_gamma, "Unit gamma, as a rational string")->required();
    add_format(ext);

    // crosscheck
    auto* cross = app.add_subcommand("crosscheck", "Cross-engine equivalence sweep");
    long cross_rank = 8;
    std::vector<long> cross_primes;
    cross->add_option("--max-rank", cross_rank, "Largest total rank");
    cross->add_option("--prime", cross_primes, "Primes (repeatable)");
    unsigned long long cross_seed = 0;
    cross->add_option("--seed", cross_seed, "Unused; accepted for uniformity");
    add_format(cross);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*inv) {
            if (datum_path.empty() == crystal_path.empty())
                throw std::invalid_argument("invariants: give exactly one of --datum/--crystal");
            InvariantReport rep = datum_path.empty()
                                      ? report_for_crystal(crystal_from_json(load_json(crystal_path)),
                                                           window_override > 0
                                                               ? std::optional<long>(window_override)
                                                               : std::nullopt)
                                      : report_for_datum(datum_from_json(load_json(datum_path)),
                                                         Int(prime));
            std::cout << format_report(rep, format);
            return 0;
        }
        if (*enumr) {
            const auto classes = enumerate_classes(ec, ed);
            if (format == "json") {
                Json out = Json::array();
                for (const PermutationDatum& d : classes) {
                    Json row;
                    row["datum"] = datum_to_json(d);
                    row["necklaces"] = necklace_class(d).words;
                    const PermTorsion t = perm_level_torsion(d);
                    row["ell"] = t.ell;
                    row["n"] = t.n;
                    row["minimal"] = is_minimal(d);
                    row["special"] = is_special(d);
                    out.push_back(std::move(row));
                }
                std::cout << dump_json(out) << "\n";
            } else {
                std::cout << (format == "csv" ? "class,ell,n,minimal,special\n" : "");
                for (const PermutationDatum& d : classes) {
                    const PermTorsion t = perm_level_torsion(d);
                    const char sep = format == "csv" ? ',' : ' ';
                    std::cout << necklace_class(d).str() << sep << t.ell << sep << t.n << sep
                              << (is_minimal(d) ? "minimal" : "-") << sep
                              << (is_special(d) ? "special" : "-") << "\n";
                }
                std::cout << classes.size() << " classes\n";
            }
            return 0;
        }
        if (*ver) {
            SuiteParams sp;
            sp.max_rank = max_rank;
            sp.seed = seed;
            sp.samples = samples;
            sp.primes = parse_primes(primes_raw);
            const SuiteResult r = run_suite(suite, sp);
            std::cout << format_suite(r, format);
            return suite_exit(r);
        }
        if (*ext) {
            const FIsocrystal f = extension_crystal(Int(ext_p), ext_d, parse_rat(ext_gamma));
            std::cout << format_report(report_for_crystal(f), format);
            return 0;
        }
        if (*cross) {
            SuiteParams sp;
            sp.max_rank = cross_rank;
            sp.seed = cross_seed;
            sp.primes = parse_primes(cross_primes);
            const SuiteResult r = run_suite("crosscheck", sp);
            std::cout << format_suite(r, format);
            return suite_exit(r);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
