// Acceptance suite: every criterion runs at its stated tolerance and prints
// one pass/fail line. Exit code is the number of failed criteria.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wb/corpus.hpp"
#include "wb/json_io.hpp"
#include "wb/model.hpp"
#include "wb/scheme.hpp"
#include "wb/second_order.hpp"
#include "wb/syntax.hpp"
#include "wb/translation.hpp"

using namespace wb;

namespace {

constexpr std::uint64_t kSeed = 20240915;

int failures = 0;

struct Criterion {
    int number;
    std::string label;
    double budget_seconds;
};

void report(const Criterion& c, bool ok, double seconds, const std::string& detail = "") {
    bool in_budget = seconds < c.budget_seconds;
    bool pass = ok && in_budget;
    std::ostringstream line;
    line << (pass ? "[PASS]" : "[FAIL]") << " criterion " << c.number << ": " << c.label << " ("
         << seconds << "s / budget " << c.budget_seconds << "s)";
    if (!detail.empty()) line << " -- " << detail;
    if (!ok) line << " -- property violated";
    if (!in_budget) line << " -- over time budget";
    std::cout << line.str() << "\n";
    if (!pass) ++failures;
}

template <typename Fn>
void run(const Criterion& c, Fn&& fn) {
    auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
        ok = fn(detail);
    } catch (const std::exception& e) {
        detail = e.what();
        ok = false;
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(c, ok, seconds, detail);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return "<missing file: " + path + ">";
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string fixture(const std::string& name) {
    return std::string(WB_FIXTURE_DIR) + "/" + name;
}

bool as_has_model_of_size(int n) {
    Theory as = build_as();
    std::vector<std::string> universe;
    for (int i = 0; i < n; ++i) universe.push_back("e" + std::to_string(i));
    std::vector<Tuple> pairs = wb::detail::all_tuples(n, 2);
    for (std::size_t mask = 0; mask < (std::size_t{1} << pairs.size()); ++mask) {
        TupleSet in_rel;
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if (mask & (std::size_t{1} << k)) in_rel.insert(pairs[k]);
        FiniteStructure m(as.sig, universe, {{"In", in_rel}});
        bool all_hold = true;
        for (const auto& ax : as.axioms)
            if (!eval(m, ax)) {
                all_hold = false;
                break;
            }
        if (all_hold) return true;
    }
    return false;
}

} // namespace

int main() {
    std::cout << "acceptance suite (seed " << kSeed << ")\n";

    run({1, "translation lemma over 200 randomized cases", 60.0}, [&](std::string& detail) {
        auto r = corpus::translation_lemma_suite(kSeed, 200);
        detail = std::to_string(r.cases) + " cases, " + std::to_string(r.failures) + " failures";
        return r.failures == 0 && r.cases == 200;
    });

    run({2, "composition coherence over 100 randomized cases", 60.0}, [&](std::string& detail) {
        auto r = corpus::composition_suite(kSeed, 100);
        detail = std::to_string(r.cases) + " cases, " + std::to_string(r.failures) + " failures";
        return r.failures == 0 && r.cases == 100;
    });

    run({3, "EF / quantifier-rank bridge on the 30-structure pool, k <= 2", 300.0},
        [&](std::string& detail) {
            auto r = corpus::ef_bridge_suite(kSeed, 30, 4, 2);
            detail = std::to_string(r.cases) + " pairs-and-rounds, " +
                     std::to_string(r.failures) + " disagreements";
            return r.failures == 0;
        });

    run({4, "linear-order EF law for 2 <= m,n <= 9, k <= 3", 30.0}, [&](std::string& detail) {
        auto r = corpus::linear_order_suite(9, 3);
        detail = std::to_string(r.cases) + " cases";
        return r.failures == 0;
    });

    run({5, "definability equals invariance on the small-structure pool", 300.0},
        [&](std::string& detail) {
            auto r = corpus::definability_suite(kSeed, 20);
            detail = std::to_string(r.cases) + " structures, " + std::to_string(r.failures) +
                     " mismatches";
            return r.failures == 0 && r.inconclusive == 0;
        });

    run({6, "strong models of induction on cycles", 10.0}, [&](std::string& detail) {
        Scheme ind = build_ind();
        for (int n = 1; n <= 12; ++n) {
            auto r = strong_model_check(corpus::cycle(n, true), std::nullopt, ind);
            if (!r.ok) {
                detail = "C_" + std::to_string(n) + " unexpectedly failed";
                return false;
            }
        }
        auto split = strong_model_check(corpus::two_cycles_with_zero(3, 3), std::nullopt, ind);
        if (split.ok) {
            detail = "C3+C3 unexpectedly passed";
            return false;
        }
        if (*split.counterexample != std::set<int>{0, 1, 2}) {
            detail = "wrong counterexample";
            return false;
        }
        detail = "C_1..C_12 strong; C3+C3 fails with the zero component";
        return true;
    });

    run({7, "definiteness verdicts on the cycle scheme, 4-set, full classes", 300.0},
        [&](std::string& detail) {
            FiniteStructure ground = io::structure_from_json(
                io::load_file(fixture("set4.json")), "set4.json");
            ClassFamily classes = io::classes_from_json(io::load_file(fixture("full2.json")),
                                                        ground, "full2.json");
            Scheme cyc =
                io::scheme_from_json(io::load_file(fixture("cycle_scheme.json")), "cycle_scheme.json");
            SOStructure so{ground, classes};

            auto run_all = [&]() {
                std::ostringstream os;
                Verdict iso = check_definite(so, cyc, DefinitenessKind::iso());
                Verdict iec = check_definite(
                    so, cyc, DefinitenessKind::in_every_cardinality(DefinitenessKind::iso()));
                Verdict eeq = check_definite(
                    so, cyc, DefinitenessKind::eeq(parse("ex x. Succ(x,x)", cyc.sig)));
                os << io::verdict_to_json(iso, ground).dump(2) << "\n"
                   << io::verdict_to_json(iec, ground).dump(2) << "\n"
                   << io::verdict_to_json(eeq, ground).dump(2) << "\n";
                bool shapes = !iso.holds && iso.counterexample &&
                              iso.counterexample->first.dom.size() == 1 &&
                              iso.counterexample->second.dom.size() == 2 && iec.holds &&
                              !eeq.holds && eeq.counterexample &&
                              eeq.counterexample->first.dom.size() == 1 &&
                              eeq.counterexample->second.dom.size() == 2;
                return std::make_pair(os.str(), shapes);
            };
            auto [bytes1, shapes1] = run_all();
            auto [bytes2, shapes2] = run_all();
            if (!shapes1 || !shapes2) {
                detail = "verdict shapes wrong";
                return false;
            }
            if (bytes1 != bytes2) {
                detail = "output not byte-reproducible";
                return false;
            }
            detail = "iso fails (1-cycle vs 2-cycle), iec holds, eeq fails; byte-stable";
            return true;
        });

    run({8, "quotient soundness over 100 randomized cases", 30.0}, [&](std::string& detail) {
        auto r = corpus::quotient_suite(kSeed, 100);
        detail = std::to_string(r.cases) + " cases, " + std::to_string(r.failures) + " failures";
        return r.failures == 0 && r.cases == 100;
    });

    run({9, "sPC closure checker golden reports", 30.0}, [&](std::string& detail) {
        FiniteStructure ground(Signature(), {"a", "b", "c"}, {});
        Scheme trivial(Signature(), truth());
        auto unary = [](std::initializer_list<int> elems) {
            TupleSet out;
            for (int e : elems) out.insert({e});
            return out;
        };
        struct Fixture {
            ClassFamily fam;
            std::string golden;
        };
        std::vector<Fixture> fixtures;
        fixtures.push_back({ClassFamily::explicit_family({{1, {unary({}), unary({0, 1, 2})}}}),
                            "golden/spc_report_pass.json"});
        fixtures.push_back({ClassFamily::explicit_family({{1, {unary({})}}}),
                            "golden/spc_report_missing_universe.json"});
        fixtures.push_back(
            {ClassFamily::explicit_family({{1, {unary({}), unary({0}), unary({0, 1, 2})}}}),
             "golden/spc_report_missing_orbit.json"});
        for (std::size_t i = 0; i < fixtures.size(); ++i) {
            auto report = check_spc(SOStructure{ground, fixtures[i].fam}, trivial);
            std::string got = io::spc_report_to_json(report, ground).dump(2) + "\n";
            if (got != read_file(fixture(fixtures[i].golden))) {
                detail = "fixture " + std::to_string(i + 1) + " diverges from its golden report";
                return false;
            }
        }
        detail = "3 golden reports match";
        return true;
    });

    run({10, "builder golden files and the finite-model absence of AS", 60.0},
        [&](std::string& detail) {
            Scheme ind = build_ind();
            struct Golden {
                std::string name;
                std::string text;
            };
            auto scheme_text = [](const Scheme& s) { return print(s.body) + "\n"; };
            auto theory_text = [](const Theory& t) {
                std::string out;
                for (const auto& ax : t.axioms) out += print(ax) + "\n";
                return out;
            };
            Signature leq({{"Leq", 2}});
            std::vector<Golden> goldens = {
                {"golden/ind.txt", scheme_text(ind)},
                {"golden/com.txt", scheme_text(build_com())},
                {"golden/sat_leq.txt", scheme_text(build_sat(leq))},
                {"golden/tarski_leq.txt", scheme_text(build_tarski(leq))},
                {"golden/as.txt", theory_text(build_as())},
                {"golden/hf_empty.txt", scheme_text(build_hf(Theory(Signature(), {})))},
                {"golden/hf_dlo.txt", scheme_text(build_hf(build_dlo()))},
                {"golden/mu_ind.txt", scheme_text(build_mu(ind, "Q"))},
                {"golden/nu_ind.txt", scheme_text(build_nu(ind, "Q"))},
                {"golden/pc_ind_depth4.txt", theory_text(build_pc(ind, 4))},
                {"golden/spc_ind_depth4.txt", theory_text(build_spc(ind, 4))},
            };
            for (const auto& g : goldens) {
                if (g.text != read_file(fixture(g.name))) {
                    detail = g.name + " diverges";
                    return false;
                }
            }
            for (int n = 1; n <= 4; ++n) {
                if (as_has_model_of_size(n)) {
                    detail = "AS has a model of size " + std::to_string(n);
                    return false;
                }
            }
            detail = std::to_string(goldens.size()) + " goldens byte-identical; AS has no model of size <= 4";
            return true;
        });

    std::cout << (failures == 0 ? "all criteria passed\n"
                                : std::to_string(failures) + " criteria failed\n");
    return failures == 0 ? 0 : 1;
}
