// wb: batch command-line workbench over formulas, schemes, translations,
// finite structures, and explicit second-order structures.
//
// Exit codes: 0 = verdict holds / operation succeeded, 1 = verdict fails
// (counterexample printed), 2 = usage or validation error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wb/corpus.hpp"
#include "wb/error.hpp"
#include "wb/json_io.hpp"
#include "wb/model.hpp"
#include "wb/scheme.hpp"
#include "wb/second_order.hpp"
#include "wb/syntax.hpp"
#include "wb/translation.hpp"

namespace {

using wb::json;

struct Options {
    std::string format = "text";
    wb::Caps caps;
    int jobs = 1;
};

void emit(const Options& opt, const json& machine, const std::string& text) {
    if (opt.format == "json") std::cout << machine.dump(2) << "\n";
    else std::cout << text;
}

wb::Signature load_signature_opt(const std::string& path) {
    if (path.empty()) return wb::Signature();
    return wb::io::signature_from_json(wb::io::load_file(path), path);
}

wb::Scheme load_scheme_arg(const std::string& arg) {
    if (arg == "ind") return wb::build_ind();
    if (arg == "com") return wb::build_com();
    return wb::io::scheme_from_json(wb::io::load_file(arg), arg);
}

std::string scheme_text(const wb::Scheme& s) { return wb::print(s.body) + "\n"; }

std::string theory_text(const wb::Theory& t) {
    std::string out;
    for (const auto& ax : t.axioms) out += wb::print(ax) + "\n";
    return out;
}

wb::Assignment parse_assignment(const std::string& text, const wb::FiniteStructure& m) {
    wb::Assignment a;
    if (text.empty()) return a;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t eq_pos = item.find('=');
        if (eq_pos == std::string::npos)
            throw wb::Error(wb::ErrorKind::BadInput, "bad assignment item '" + item + "'");
        a[item.substr(0, eq_pos)] = m.index_of(item.substr(eq_pos + 1));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return a;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"first-order workbench: schemes, translations, finite models, definiteness"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--format", opt.format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_option("--max-classes", opt.caps.max_invariant_classes,
                   "cap on invariant classes in strong-model checks");
    app.add_option("--max-tuples", opt.caps.max_tuples, "cap on enumerated tuple spaces");
    app.add_option("--jobs", opt.jobs, "worker count for corpus suites");

    int exit_code = 0;

    // ---- parse / print ----
    std::string p_formula, p_sig;
    bool p_allow_p = false;
    for (const char* name : {"parse", "print"}) {
        auto* cmd = app.add_subcommand(name, name == std::string("parse")
                                                 ? "parse a formula and print its canonical form"
                                                 : "print the canonical form of a formula");
        cmd->add_option("--formula", p_formula, "formula text")->required();
        cmd->add_option("--sig", p_sig, "signature file");
        cmd->add_flag("--allow-p", p_allow_p, "admit the scheme predicate P");
        cmd->callback([&]() {
            wb::Formula f = wb::parse(p_formula, load_signature_opt(p_sig), p_allow_p);
            emit(opt, json{{"formula", wb::print(f)}}, wb::print(f) + "\n");
        });
    }

    // ---- instance ----
    auto* inst = app.add_subcommand("instance", "substitute a formula for P and close");
    std::string inst_scheme, inst_phi, inst_pivot = "x";
    inst->add_option("--scheme", inst_scheme, "scheme file or builtin name")->required();
    inst->add_option("--phi", inst_phi, "formula to substitute")->required();
    inst->add_option("--pivot", inst_pivot, "pivot variable (default x)");
    inst->callback([&]() {
        wb::Scheme s = load_scheme_arg(inst_scheme);
        wb::Formula phi = wb::parse(inst_phi, s.sig);
        wb::Formula out = wb::mk_instance(s, phi, inst_pivot);
        emit(opt, json{{"instance", wb::print(out)}}, wb::print(out) + "\n");
    });

    // ---- instances ----
    auto* insts = app.add_subcommand("instances", "enumerate instances up to a size bound");
    std::string insts_scheme;
    int insts_depth = 2;
    bool insts_pf = false;
    insts->add_option("--scheme", insts_scheme)->required();
    insts->add_option("--depth", insts_depth, "maximum AST size of the substituted formula");
    insts->add_flag("--pf", insts_pf, "parameter-free instances only");
    insts->callback([&]() {
        wb::Scheme s = load_scheme_arg(insts_scheme);
        auto list = wb::instances_up_to(s, insts_depth, insts_pf);
        json arr = json::array();
        std::string text;
        for (const auto& f : list) {
            arr.push_back(wb::print(f));
            text += wb::print(f) + "\n";
        }
        emit(opt, json{{"instances", arr}}, text);
    });

    // ---- build ----
    auto* build = app.add_subcommand("build", "emit a built-in scheme or theory");
    std::string build_what, build_sig, build_theory, build_scheme, build_q = "Q";
    int build_depth = 4;
    build->add_option("what", build_what, "ind|com|sat|tarski|as|dlo|hf|mu|nu|pc|spc")->required();
    build->add_option("--sig", build_sig, "signature file (sat, tarski)");
    build->add_option("--theory", build_theory, "theory file (hf)");
    build->add_option("--scheme", build_scheme, "scheme file (mu, nu, pc, spc)");
    build->add_option("--q", build_q, "fresh predicate name (mu, nu)");
    build->add_option("--depth", build_depth, "truncation depth (pc, spc)");
    build->callback([&]() {
        auto emit_scheme = [&](const wb::Scheme& s) {
            emit(opt, wb::io::scheme_to_json(s), scheme_text(s));
        };
        auto emit_theory = [&](const wb::Theory& t) {
            emit(opt, wb::io::theory_to_json(t), theory_text(t));
        };
        if (build_what == "ind") emit_scheme(wb::build_ind());
        else if (build_what == "com") emit_scheme(wb::build_com());
        else if (build_what == "sat") emit_scheme(wb::build_sat(load_signature_opt(build_sig)));
        else if (build_what == "tarski") emit_scheme(wb::build_tarski(load_signature_opt(build_sig)));
        else if (build_what == "as") emit_theory(wb::build_as());
        else if (build_what == "dlo") emit_theory(wb::build_dlo());
        else if (build_what == "hf") {
            if (build_theory.empty())
                throw wb::Error(wb::ErrorKind::BadInput, "build hf requires --theory");
            emit_scheme(wb::build_hf(wb::io::theory_from_json(wb::io::load_file(build_theory),
                                                              build_theory)));
        } else if (build_what == "mu" || build_what == "nu") {
            if (build_scheme.empty())
                throw wb::Error(wb::ErrorKind::BadInput, "build mu/nu requires --scheme");
            wb::Scheme alpha = load_scheme_arg(build_scheme);
            emit_scheme(build_what == "mu" ? wb::build_mu(alpha, build_q)
                                           : wb::build_nu(alpha, build_q));
        } else if (build_what == "pc" || build_what == "spc") {
            if (build_scheme.empty())
                throw wb::Error(wb::ErrorKind::BadInput, "build pc/spc requires --scheme");
            wb::Scheme s = load_scheme_arg(build_scheme);
            emit_theory(build_what == "pc" ? wb::build_pc(s, build_depth)
                                           : wb::build_spc(s, build_depth));
        } else {
            throw wb::Error(wb::ErrorKind::BadInput, "unknown builder '" + build_what + "'");
        }
    });

    // ---- translate ----
    auto* translate = app.add_subcommand("translate", "apply a translation to a formula");
    std::string tr_file, tr_formula;
    translate->add_option("--translation", tr_file)->required();
    translate->add_option("--formula", tr_formula)->required();
    translate->callback([&]() {
        wb::Translation t = wb::io::translation_from_json(wb::io::load_file(tr_file), tr_file);
        wb::Formula f = wb::parse(tr_formula, t.source_sig());
        wb::Formula out = wb::apply(t, f);
        emit(opt, json{{"formula", wb::print(out)}}, wb::print(out) + "\n");
    });

    // ---- compose ----
    auto* comp = app.add_subcommand("compose", "compose two translations (outer after inner)");
    std::string comp_outer, comp_inner, comp_out;
    comp->add_option("--outer", comp_outer, "translation applied second")->required();
    comp->add_option("--inner", comp_inner, "translation applied first")->required();
    comp->add_option("-o,--output", comp_out, "write the composite to a file");
    comp->callback([&]() {
        wb::Translation t = wb::io::translation_from_json(wb::io::load_file(comp_outer), comp_outer);
        wb::Translation u = wb::io::translation_from_json(wb::io::load_file(comp_inner), comp_inner);
        wb::Translation c = wb::compose(t, u);
        json j = wb::io::translation_to_json(c);
        if (!comp_out.empty()) wb::io::save_file(comp_out, j);
        else std::cout << j.dump(2) << "\n";
    });

    // ---- flags ----
    auto* flags_cmd = app.add_subcommand("flags", "dimension and syntactic property flags");
    std::string flags_file;
    flags_cmd->add_option("--translation", flags_file)->required();
    flags_cmd->callback([&]() {
        wb::Translation t =
            wb::io::translation_from_json(wb::io::load_file(flags_file), flags_file);
        wb::TranslationFlags f = wb::flags(t);
        json j{{"dimension", f.dimension},
               {"unrelativized", f.unrelativized},
               {"identity_preserving", f.identity_preserving},
               {"direct", f.direct}};
        emit(opt, j,
             "dimension " + std::to_string(f.dimension) + "\nunrelativized " +
                 (f.unrelativized ? "true" : "false") + "\nidentity_preserving " +
                 (f.identity_preserving ? "true" : "false") + "\ndirect " +
                 (f.direct ? "true" : "false") + "\n");
    });

    // ---- iso-conditions ----
    auto* isoc = app.add_subcommand("iso-conditions",
                                    "the five isomorphism-of-interpretations conditions");
    std::string isoc_left, isoc_right, isoc_iota;
    isoc->add_option("--left", isoc_left)->required();
    isoc->add_option("--right", isoc_right)->required();
    isoc->add_option("--iota", isoc_iota, "linking formula (x1.. vs x1s..)")->required();
    isoc->callback([&]() {
        wb::Translation t1 = wb::io::translation_from_json(wb::io::load_file(isoc_left), isoc_left);
        wb::Translation t2 =
            wb::io::translation_from_json(wb::io::load_file(isoc_right), isoc_right);
        wb::Formula iota = wb::parse(isoc_iota, t1.target_sig());
        auto conds = wb::iso_conditions(t1, t2, iota);
        json arr = json::array();
        std::string text;
        for (const auto& c : conds) {
            arr.push_back(wb::print(c));
            text += wb::print(c) + "\n";
        }
        emit(opt, json{{"conditions", arr}}, text);
    });

    // ---- validate-translation ----
    auto* vt = app.add_subcommand("validate-translation",
                                  "check a translation's side conditions in a model");
    std::string vt_tr, vt_model;
    vt->add_option("--translation", vt_tr)->required();
    vt->add_option("--model", vt_model)->required();
    vt->callback([&]() {
        wb::Translation t = wb::io::translation_from_json(wb::io::load_file(vt_tr), vt_tr);
        wb::FiniteStructure m =
            wb::io::structure_from_json(wb::io::load_file(vt_model), vt_model);
        auto report = wb::validate_on_model(t, m);
        std::string text = report.clean() ? "clean\n" : "";
        for (const auto& v : report.violations) text += "violation: " + v + "\n";
        for (const auto& w : report.warnings) text += "warning: " + w + "\n";
        emit(opt, wb::io::translation_report_to_json(report), text);
        if (!report.clean()) exit_code = 1;
    });

    // ---- eval ----
    auto* ev = app.add_subcommand("eval", "evaluate a formula in a finite structure");
    std::string ev_model, ev_formula, ev_assign;
    ev->add_option("--model", ev_model)->required();
    ev->add_option("--formula", ev_formula)->required();
    ev->add_option("--assign", ev_assign, "assignment, e.g. x=e0,y=e1");
    ev->callback([&]() {
        wb::FiniteStructure m =
            wb::io::structure_from_json(wb::io::load_file(ev_model), ev_model);
        wb::Formula f = wb::parse(ev_formula, m.sig());
        bool value = wb::eval(m, f, parse_assignment(ev_assign, m));
        emit(opt, json{{"value", value}}, std::string(value ? "true" : "false") + "\n");
        if (!value) exit_code = 1;
    });

    // ---- aut ----
    auto* aut = app.add_subcommand("aut", "automorphism group by backtracking");
    std::string aut_model;
    aut->add_option("--model", aut_model)->required();
    aut->callback([&]() {
        wb::FiniteStructure m =
            wb::io::structure_from_json(wb::io::load_file(aut_model), aut_model);
        auto perms = wb::automorphisms(m);
        json arr = json::array();
        std::string text;
        for (const auto& g : perms) {
            json row = json::array();
            std::string line;
            for (int i = 0; i < m.size(); ++i) {
                row.push_back(m.element(g[static_cast<std::size_t>(i)]));
                line += (i ? " " : "") + m.element(g[static_cast<std::size_t>(i)]);
            }
            arr.push_back(std::move(row));
            text += line + "\n";
        }
        emit(opt, json{{"count", perms.size()}, {"automorphisms", arr}}, text);
    });

    // ---- defpf ----
    auto* defpf = app.add_subcommand("defpf", "parameter-free definable family");
    std::string defpf_model;
    int defpf_arity = 1;
    defpf->add_option("--model", defpf_model)->required();
    defpf->add_option("--max-arity", defpf_arity);
    defpf->callback([&]() {
        wb::FiniteStructure m =
            wb::io::structure_from_json(wb::io::load_file(defpf_model), defpf_model);
        wb::ClassFamily fam = wb::mk_defpf_family(m, defpf_arity, opt.caps);
        json classes = json::object();
        std::string text;
        for (const auto& [arity, members] : fam.explicit_classes()) {
            json arr = json::array();
            for (const auto& member : members)
                arr.push_back(wb::io::tuple_set_to_json(member, m));
            classes[std::to_string(arity)] = std::move(arr);
            text += "arity " + std::to_string(arity) + ": " + std::to_string(members.size()) +
                    " classes\n";
        }
        emit(opt, json{{"classes", classes}}, text);
    });

    // ---- quotient ----
    auto* quot = app.add_subcommand("quotient", "collapse a model along a congruence");
    std::string quot_model, quot_eta;
    quot->add_option("--model", quot_model)->required();
    quot->add_option("--eta", quot_eta, "equivalence formula with two free variables")->required();
    quot->callback([&]() {
        wb::FiniteStructure m =
            wb::io::structure_from_json(wb::io::load_file(quot_model), quot_model);
        wb::Formula eta = wb::parse(quot_eta, m.sig());
        wb::FiniteStructure q = wb::quotient(m, eta);
        std::cout << wb::io::structure_to_json(q).dump(2) << "\n";
    });

    // ---- internal ----
    auto* internal = app.add_subcommand("internal", "internal model carved by a translation");
    std::string int_model, int_tr;
    bool int_no_quotient = false;
    internal->add_option("--model", int_model)->required();
    internal->add_option("--translation", int_tr)->required();
    internal->add_flag("--no-quotient", int_no_quotient, "keep eta as an explicit relation");
    internal->callback([&]() {
        wb::FiniteStructure m =
            wb::io::structure_from_json(wb::io::load_file(int_model), int_model);
        wb::Translation t = wb::io::translation_from_json(wb::io::load_file(int_tr), int_tr);
        wb::InternalModel im = wb::internal_model(m, t, !int_no_quotient);
        json j = wb::io::structure_to_json(im.structure);
        if (!im.quotiented) j["eta"] = wb::io::tuple_set_to_json(im.eta, im.structure);
        std::cout << j.dump(2) << "\n";
    });

    // ---- iso ----
    auto* iso = app.add_subcommand("iso", "isomorphism search");
    std::string iso_left, iso_right;
    iso->add_option("--left", iso_left)->required();
    iso->add_option("--right", iso_right)->required();
    iso->callback([&]() {
        wb::FiniteStructure a =
            wb::io::structure_from_json(wb::io::load_file(iso_left), iso_left);
        wb::FiniteStructure b =
            wb::io::structure_from_json(wb::io::load_file(iso_right), iso_right);
        auto found = wb::find_isomorphism(a, b);
        if (found) {
            json map = json::object();
            std::string text;
            for (int i = 0; i < a.size(); ++i) {
                map[a.element(i)] = b.element((*found)[static_cast<std::size_t>(i)]);
                text += a.element(i) + " -> " + b.element((*found)[static_cast<std::size_t>(i)]) + "\n";
            }
            emit(opt, json{{"isomorphic", true}, {"map", map}}, text);
        } else {
            emit(opt, json{{"isomorphic", false}}, "not isomorphic\n");
            exit_code = 1;
        }
    });

    // ---- ef ----
    auto* ef = app.add_subcommand("ef", "Ehrenfeucht-Fraisse game value");
    std::string ef_left, ef_right;
    int ef_rounds = 1;
    ef->add_option("--left", ef_left)->required();
    ef->add_option("--right", ef_right)->required();
    ef->add_option("--rounds", ef_rounds)->required();
    ef->callback([&]() {
        wb::FiniteStructure a = wb::io::structure_from_json(wb::io::load_file(ef_left), ef_left);
        wb::FiniteStructure b = wb::io::structure_from_json(wb::io::load_file(ef_right), ef_right);
        wb::EfResult r = wb::ef_game(a, b, ef_rounds);
        bool dup = r.winner == wb::EfWinner::Duplicator;
        json trace = json::array();
        std::string text = std::string("winner ") + (dup ? "Duplicator" : "Spoiler") + "\n";
        for (const auto& mv : r.trace) {
            trace.push_back(json{{"round", mv.round},
                                 {"side", mv.side == 0 ? "left" : "right"},
                                 {"pick", mv.spoiler_pick},
                                 {"reply", mv.duplicator_reply}});
            text += "round " + std::to_string(mv.round) + ": spoiler " +
                    (mv.side == 0 ? "left " : "right ") + mv.spoiler_pick + ", duplicator " +
                    mv.duplicator_reply + "\n";
        }
        emit(opt, json{{"winner", dup ? "Duplicator" : "Spoiler"}, {"trace", trace}}, text);
        if (!dup) exit_code = 1;
    });

    // ---- bf ----
    auto* bf = app.add_subcommand("bf", "greatest back-and-forth system");
    std::string bf_left, bf_right;
    bf->add_option("--left", bf_left)->required();
    bf->add_option("--right", bf_right)->required();
    bf->callback([&]() {
        wb::FiniteStructure a = wb::io::structure_from_json(wb::io::load_file(bf_left), bf_left);
        wb::FiniteStructure b = wb::io::structure_from_json(wb::io::load_file(bf_right), bf_right);
        auto sys = wb::bf_system(a, b, opt.caps);
        if (sys) {
            emit(opt, json{{"nonempty", true}, {"maps", sys->maps.size()}},
                 "nonempty (" + std::to_string(sys->maps.size()) + " maps)\n");
        } else {
            emit(opt, json{{"nonempty", false}}, "empty\n");
            exit_code = 1;
        }
    });

    // ---- strong ----
    auto* strong = app.add_subcommand("strong", "strong-model check over invariant subsets");
    std::string strong_model, strong_scheme, strong_eq;
    strong->add_option("--model", strong_model)->required();
    strong->add_option("--scheme", strong_scheme, "scheme file or builtin (ind, com)")->required();
    strong->add_option("--eq", strong_eq, "binary relation symbol interpreted as equality");
    strong->callback([&]() {
        wb::FiniteStructure m =
            wb::io::structure_from_json(wb::io::load_file(strong_model), strong_model);
        wb::Scheme s = load_scheme_arg(strong_scheme);
        std::optional<std::string> eq_symbol;
        if (!strong_eq.empty()) eq_symbol = strong_eq;
        auto report = wb::strong_model_check(m, eq_symbol, s, opt.caps);
        if (report.ok) {
            emit(opt, json{{"ok", true}}, "ok\n");
        } else {
            json j{{"ok", false},
                   {"counterexample", wb::io::element_set_to_json(*report.counterexample, m)}};
            std::string text = "counterexample:";
            for (int e : *report.counterexample) text += " " + m.element(e);
            emit(opt, j, text + "\n");
            exit_code = 1;
        }
    });

    // ---- spc-check ----
    auto* spc = app.add_subcommand("spc-check", "set-parameter comprehension closure check");
    std::string spc_ground, spc_classes, spc_scheme;
    spc->add_option("--ground", spc_ground)->required();
    spc->add_option("--classes", spc_classes)->required();
    spc->add_option("--scheme", spc_scheme)->required();
    spc->callback([&]() {
        wb::FiniteStructure g =
            wb::io::structure_from_json(wb::io::load_file(spc_ground), spc_ground);
        wb::ClassFamily fam =
            wb::io::classes_from_json(wb::io::load_file(spc_classes), g, spc_classes);
        wb::Scheme s = load_scheme_arg(spc_scheme);
        auto report = wb::check_spc(wb::SOStructure{g, fam}, s, opt.caps);
        std::string text = report.ok() ? "ok\n" : "";
        for (const auto& f : report.failures) {
            text += f.kind + " failure at class {";
            bool first = true;
            for (int e : f.x) {
                text += (first ? "" : ",") + g.element(e);
                first = false;
            }
            text += "}";
            if (f.witness) {
                text += " missing {";
                first = true;
                for (int e : *f.witness) {
                    text += (first ? "" : ",") + g.element(e);
                    first = false;
                }
                text += "}";
            }
            text += "\n";
        }
        emit(opt, wb::io::spc_report_to_json(report, g), text);
        if (!report.ok()) exit_code = 1;
    });

    // ---- strong-models ----
    auto* sm = app.add_subcommand("strong-models", "enumerate strong-model tuples");
    std::string sm_ground, sm_classes, sm_scheme;
    sm->add_option("--ground", sm_ground)->required();
    sm->add_option("--classes", sm_classes)->required();
    sm->add_option("--scheme", sm_scheme)->required();
    sm->callback([&]() {
        wb::FiniteStructure g =
            wb::io::structure_from_json(wb::io::load_file(sm_ground), sm_ground);
        wb::ClassFamily fam =
            wb::io::classes_from_json(wb::io::load_file(sm_classes), g, sm_classes);
        wb::Scheme s = load_scheme_arg(sm_scheme);
        auto tuples = wb::x_strong_models(wb::SOStructure{g, fam}, s, opt.caps);
        json arr = json::array();
        for (const auto& t : tuples) arr.push_back(wb::io::model_tuple_to_json(t, g));
        emit(opt, json{{"count", tuples.size()}, {"tuples", arr}},
             std::to_string(tuples.size()) + " strong-model tuples\n");
    });

    // ---- definite ----
    auto* definite = app.add_subcommand("definite", "definiteness verdict over tuple pairs");
    std::string def_ground, def_classes, def_scheme, def_phi, def_alpha, def_ord;
    definite->add_option("--ground", def_ground)->required();
    definite->add_option("--classes", def_classes)->required();
    definite->add_option("--scheme", def_scheme)->required();
    definite->add_option("--phi", def_phi, "iso|eeq|iec|height")->required();
    definite->add_option("--alpha", def_alpha, "sentence for eeq (or iec of eeq)");
    definite->add_option("--ord", def_ord, "one-free-variable formula for height");
    definite->callback([&]() {
        wb::FiniteStructure g =
            wb::io::structure_from_json(wb::io::load_file(def_ground), def_ground);
        wb::ClassFamily fam =
            wb::io::classes_from_json(wb::io::load_file(def_classes), g, def_classes);
        wb::Scheme s = load_scheme_arg(def_scheme);
        wb::DefinitenessKind kind = wb::DefinitenessKind::iso();
        if (def_phi == "iso") {
            kind = wb::DefinitenessKind::iso();
        } else if (def_phi == "eeq") {
            if (def_alpha.empty())
                throw wb::Error(wb::ErrorKind::BadInput, "--phi eeq requires --alpha");
            kind = wb::DefinitenessKind::eeq(wb::parse(def_alpha, s.sig));
        } else if (def_phi == "iec") {
            wb::DefinitenessKind inner =
                def_alpha.empty() ? wb::DefinitenessKind::iso()
                                  : wb::DefinitenessKind::eeq(wb::parse(def_alpha, s.sig));
            kind = wb::DefinitenessKind::in_every_cardinality(std::move(inner));
        } else if (def_phi == "height") {
            if (def_ord.empty())
                throw wb::Error(wb::ErrorKind::BadInput, "--phi height requires --ord");
            kind = wb::DefinitenessKind::height(wb::parse(def_ord, s.sig));
        } else {
            throw wb::Error(wb::ErrorKind::BadInput, "unknown phi '" + def_phi + "'");
        }
        wb::Verdict v = wb::check_definite(wb::SOStructure{g, fam}, s, kind, opt.caps);
        std::string text = v.holds ? (v.vacuous ? "holds (vacuously)\n" : "holds\n")
                                   : "fails: " + v.failed_tag + "\n";
        emit(opt, wb::io::verdict_to_json(v, g), text);
        if (!v.holds) exit_code = 1;
    });

    // ---- retract ----
    auto* retract = app.add_subcommand("retract", "retract witness check");
    std::string re_ground, re_classes, re_t, re_s, re_witness;
    retract->add_option("--ground", re_ground)->required();
    retract->add_option("--classes", re_classes)->required();
    retract->add_option("--t", re_t, "translation file")->required();
    retract->add_option("--s", re_s, "translation file")->required();
    retract->add_option("--witness", re_witness, "formula over x1, x1s..")->required();
    retract->callback([&]() {
        wb::FiniteStructure g =
            wb::io::structure_from_json(wb::io::load_file(re_ground), re_ground);
        wb::ClassFamily fam =
            wb::io::classes_from_json(wb::io::load_file(re_classes), g, re_classes);
        wb::Translation t = wb::io::translation_from_json(wb::io::load_file(re_t), re_t);
        wb::Translation s_tr = wb::io::translation_from_json(wb::io::load_file(re_s), re_s);
        wb::Formula witness = wb::parse(re_witness, g.sig());
        wb::Verdict v = wb::check_retract(wb::SOStructure{g, fam}, t, s_tr, witness, opt.caps);
        std::string text = v.holds ? "holds\n" : "fails: " + v.failed_tag + "\n";
        emit(opt, wb::io::verdict_to_json(v, g), text);
        if (!v.holds) exit_code = 1;
    });

    // ---- corpus ----
    auto* corpus_cmd = app.add_subcommand("corpus", "run the randomized property suites");
    std::string corpus_config;
    std::uint64_t corpus_seed = 0;
    corpus_cmd->add_option("--config", corpus_config, "config file");
    corpus_cmd->add_option("--seed", corpus_seed, "override the corpus seed");
    corpus_cmd->callback([&]() {
        wb::corpus::CorpusConfig config;
        if (!corpus_config.empty()) {
            json j = wb::io::load_file(corpus_config);
            if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
            if (j.contains("jobs")) config.jobs = j["jobs"].get<int>();
            if (j.contains("suites")) {
                config.suites.clear();
                for (const auto& s : j["suites"]) config.suites.push_back(s.get<std::string>());
            }
            if (j.contains("cases"))
                for (auto it = j["cases"].begin(); it != j["cases"].end(); ++it)
                    config.cases[it.key()] = it.value().get<int>();
        }
        if (const char* env_seed = std::getenv("WB_SEED"))
            config.seed = std::strtoull(env_seed, nullptr, 10);
        if (corpus_seed != 0) config.seed = corpus_seed;
        if (opt.jobs > 1) config.jobs = opt.jobs;

        auto results = wb::corpus::run_corpus(config);
        json arr = json::array();
        std::string text;
        bool all_ok = true;
        for (const auto& r : results) {
            arr.push_back(json{{"suite", r.name},
                               {"cases", r.cases},
                               {"failures", r.failures},
                               {"inconclusive", r.inconclusive}});
            text += (r.ok() ? "[pass] " : "[FAIL] ") + r.name + ": " + std::to_string(r.cases) +
                    " cases, " + std::to_string(r.failures) + " failures";
            if (r.inconclusive) text += ", " + std::to_string(r.inconclusive) + " inconclusive";
            text += "\n";
            all_ok = all_ok && r.ok();
        }
        emit(opt, json{{"seed", config.seed}, {"suites", arr}}, text);
        if (!all_ok) exit_code = 1;
    });

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const wb::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
