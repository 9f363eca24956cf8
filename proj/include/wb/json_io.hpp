#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wb/error.hpp"
#include "wb/model.hpp"
#include "wb/scheme.hpp"
#include "wb/second_order.hpp"
#include "wb/syntax.hpp"
#include "wb/translation.hpp"

// File formats. Everything is JSON with formula text inline:
//   signature:   {"relations": {"Succ": 2, "Zero": 1}}
//   scheme:      {"signature": {...}, "body": "<formula with P>"}
//   theory:      {"signature": {...}, "axioms": ["...", ...]}
//   structure:   {"signature": {...}, "universe": ["e0",...],
//                 "relations": {"Leq": [["e0","e1"],...]}}
//   translation: {"source": {...}, "target": {...}, "dim": n,
//                 "delta": "...", "eta": "...", "relations": {"R": "..."}}
//                delta uses x1..xn, eta x1_1..x2_n, relations v1_1..vk_n
//   classes:     {"full_up_to_arity": n} or
//                {"classes": {"1": [[["e0"],["e1"]], ...], "2": [...]}}

namespace wb {

using json = nlohmann::ordered_json;

namespace io {

inline json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::BadInput, "cannot open file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorKind::BadInput, "file '" + path + "': " + e.what());
    }
    return j;
}

inline void save_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::BadInput, "cannot open file '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

inline const json& field(const json& j, const std::string& key, const std::string& context) {
    auto it = j.find(key);
    if (it == j.end())
        throw Error(ErrorKind::BadInput, context + ": missing field '" + key + "'");
    return *it;
}

// ---- signatures ----

inline Signature signature_from_json(const json& j, const std::string& context) {
    if (!j.is_object()) throw Error(ErrorKind::BadInput, context + ": signature must be an object");
    const json& rels = field(j, "relations", context);
    std::map<std::string, int> relations;
    for (auto it = rels.begin(); it != rels.end(); ++it) {
        if (!it.value().is_number_integer())
            throw Error(ErrorKind::BadInput, context + ": arity of '" + it.key() + "' must be an integer");
        relations[it.key()] = it.value().get<int>();
    }
    return Signature(std::move(relations));
}

inline json signature_to_json(const Signature& sig) {
    json rels = json::object();
    for (const auto& [name, arity] : sig.relations()) rels[name] = arity;
    return json{{"relations", std::move(rels)}};
}

// ---- schemes and theories ----

inline Scheme scheme_from_json(const json& j, const std::string& context) {
    Signature sig = signature_from_json(field(j, "signature", context), context);
    const json& body = field(j, "body", context);
    if (!body.is_string()) throw Error(ErrorKind::BadInput, context + ": body must be a string");
    return Scheme(sig, parse(body.get<std::string>(), sig, /*allow_p=*/true));
}

inline json scheme_to_json(const Scheme& s) {
    return json{{"signature", signature_to_json(s.sig)}, {"body", print(s.body)}};
}

inline Theory theory_from_json(const json& j, const std::string& context) {
    Signature sig = signature_from_json(field(j, "signature", context), context);
    const json& axioms = field(j, "axioms", context);
    if (!axioms.is_array()) throw Error(ErrorKind::BadInput, context + ": axioms must be an array");
    std::vector<Formula> parsed;
    for (const auto& ax : axioms) {
        if (!ax.is_string()) throw Error(ErrorKind::BadInput, context + ": axiom must be a string");
        parsed.push_back(parse(ax.get<std::string>(), sig, /*allow_p=*/false));
    }
    return Theory(sig, std::move(parsed));
}

inline json theory_to_json(const Theory& t) {
    json axioms = json::array();
    for (const auto& ax : t.axioms) axioms.push_back(print(ax));
    return json{{"signature", signature_to_json(t.sig)}, {"axioms", std::move(axioms)}};
}

// ---- structures ----

inline FiniteStructure structure_from_json(const json& j, const std::string& context) {
    Signature sig = signature_from_json(field(j, "signature", context), context);
    const json& uni = field(j, "universe", context);
    if (!uni.is_array() || uni.empty())
        throw Error(ErrorKind::BadInput, context + ": universe must be a nonempty array");
    std::vector<std::string> universe;
    std::map<std::string, int> index;
    for (const auto& e : uni) {
        if (!e.is_string()) throw Error(ErrorKind::BadInput, context + ": element must be a string");
        index[e.get<std::string>()] = static_cast<int>(universe.size());
        universe.push_back(e.get<std::string>());
    }
    std::map<std::string, TupleSet> interp;
    if (j.contains("relations")) {
        const json& rels = j["relations"];
        for (auto it = rels.begin(); it != rels.end(); ++it) {
            TupleSet tuples;
            for (const auto& row : it.value()) {
                Tuple t;
                for (const auto& e : row) {
                    auto found = index.find(e.get<std::string>());
                    if (found == index.end())
                        throw Error(ErrorKind::BadInput,
                                    context + ": tuple entry '" + e.get<std::string>() +
                                        "' not in universe");
                    t.push_back(found->second);
                }
                tuples.insert(std::move(t));
            }
            interp.emplace(it.key(), std::move(tuples));
        }
    }
    return FiniteStructure(sig, std::move(universe), std::move(interp));
}

inline json structure_to_json(const FiniteStructure& m) {
    json universe = json::array();
    for (const auto& e : m.universe()) universe.push_back(e);
    json rels = json::object();
    for (const auto& [name, tuples] : m.interp()) {
        json rows = json::array();
        for (const auto& t : tuples) {
            json row = json::array();
            for (int e : t) row.push_back(m.element(e));
            rows.push_back(std::move(row));
        }
        rels[name] = std::move(rows);
    }
    return json{{"signature", signature_to_json(m.sig())},
                {"universe", std::move(universe)},
                {"relations", std::move(rels)}};
}

// ---- translations ----

inline Translation translation_from_json(const json& j, const std::string& context) {
    Signature source = signature_from_json(field(j, "source", context), context);
    Signature target = signature_from_json(field(j, "target", context), context);
    const json& dim = field(j, "dim", context);
    if (!dim.is_number_integer())
        throw Error(ErrorKind::BadInput, context + ": dim must be an integer");
    Formula delta = parse(field(j, "delta", context).get<std::string>(), target);
    Formula eta = parse(field(j, "eta", context).get<std::string>(), target);
    std::map<std::string, Formula> rels;
    const json& rel_map = field(j, "relations", context);
    for (auto it = rel_map.begin(); it != rel_map.end(); ++it)
        rels.emplace(it.key(), parse(it.value().get<std::string>(), target));
    return Translation(std::move(source), std::move(target), dim.get<int>(), std::move(delta),
                       std::move(eta), std::move(rels));
}

inline json translation_to_json(const Translation& t) {
    json rels = json::object();
    for (const auto& [name, f] : t.rel_map()) rels[name] = print(f);
    return json{{"source", signature_to_json(t.source_sig())},
                {"target", signature_to_json(t.target_sig())},
                {"dim", t.dim()},
                {"delta", print(t.delta())},
                {"eta", print(t.eta())},
                {"relations", std::move(rels)}};
}

// ---- class families ----

inline ClassFamily classes_from_json(const json& j, const FiniteStructure& ground,
                                     const std::string& context) {
    if (j.contains("full_up_to_arity"))
        return ClassFamily::full(j["full_up_to_arity"].get<int>());
    const json& classes = field(j, "classes", context);
    std::map<int, std::vector<TupleSet>> out;
    for (auto it = classes.begin(); it != classes.end(); ++it) {
        int arity;
        try {
            arity = std::stoi(it.key());
        } catch (const std::exception&) {
            throw Error(ErrorKind::BadInput, context + ": class arity key '" + it.key() +
                                                 "' is not an integer");
        }
        std::vector<TupleSet> members;
        for (const auto& member : it.value()) {
            TupleSet s;
            for (const auto& row : member) {
                Tuple t;
                for (const auto& e : row) t.push_back(ground.index_of(e.get<std::string>()));
                s.insert(std::move(t));
            }
            members.push_back(std::move(s));
        }
        out[arity] = std::move(members);
    }
    return ClassFamily::explicit_family(std::move(out));
}

// ---- tuples, verdicts, reports ----

inline json tuple_set_to_json(const TupleSet& s, const FiniteStructure& ground) {
    json rows = json::array();
    for (const auto& t : s) {
        json row = json::array();
        for (int e : t) row.push_back(ground.element(e));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json element_set_to_json(const std::set<int>& s, const FiniteStructure& ground) {
    json out = json::array();
    for (int e : s) out.push_back(ground.element(e));
    return out;
}

inline json model_tuple_to_json(const ModelTuple& t, const FiniteStructure& ground) {
    json rels = json::object();
    for (const auto& [name, tuples] : t.rels) rels[name] = tuple_set_to_json(tuples, ground);
    return json{{"dom", element_set_to_json(t.dom, ground)},
                {"eq", tuple_set_to_json(t.eq, ground)},
                {"rels", std::move(rels)}};
}

inline json verdict_to_json(const Verdict& v, const FiniteStructure& ground) {
    json out;
    out["holds"] = v.holds;
    if (v.vacuous) out["vacuous"] = true;
    if (v.witness) out["witness"] = tuple_set_to_json(*v.witness, ground);
    if (v.counterexample) {
        out["counterexample"] = json::array({model_tuple_to_json(v.counterexample->first, ground),
                                             model_tuple_to_json(v.counterexample->second, ground)});
    }
    if (!v.failed_tag.empty()) out["guard_tag"] = v.failed_tag;
    return out;
}

inline json spc_report_to_json(const SpcReport& r, const FiniteStructure& ground) {
    json failures = json::array();
    for (const auto& f : r.failures) {
        json entry{{"kind", f.kind}, {"class", element_set_to_json(f.x, ground)}};
        if (f.witness) entry["witness"] = element_set_to_json(*f.witness, ground);
        failures.push_back(std::move(entry));
    }
    return json{{"ok", r.ok()}, {"failures", std::move(failures)}};
}

inline json translation_report_to_json(const TranslationReport& r) {
    return json{{"clean", r.clean()}, {"violations", r.violations}, {"warnings", r.warnings}};
}

} // namespace io

} // namespace wb
