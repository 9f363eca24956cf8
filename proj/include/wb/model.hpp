#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wb/error.hpp"
#include "wb/scheme.hpp"
#include "wb/syntax.hpp"
#include "wb/translation.hpp"

// Finite relational structures: Tarskian evaluation (with optional equality
// override, domain relativization and P-extension), automorphism search,
// invariant relations, quotients, internal models, isomorphism search,
// Ehrenfeucht-Fraisse games, back-and-forth systems, and strong-model
// checking.

namespace wb {

using Tuple = std::vector<int>;
using TupleSet = std::set<Tuple>;

class FiniteStructure {
public:
    FiniteStructure(Signature sig, std::vector<std::string> universe,
                    std::map<std::string, TupleSet> interp)
        : sig_(std::move(sig)), universe_(std::move(universe)), interp_(std::move(interp)) {
        if (universe_.empty())
            throw Error(ErrorKind::BadInput, "structure universe must be nonempty");
        std::set<std::string> names;
        for (const auto& e : universe_) {
            if (e.empty()) throw Error(ErrorKind::BadInput, "empty element name");
            if (!names.insert(e).second)
                throw Error(ErrorKind::BadInput, "duplicate element name '" + e + "'");
        }
        for (const auto& [name, _] : sig_.relations())
            interp_.try_emplace(name);  // absent relation means empty
        for (const auto& [name, tuples] : interp_) {
            int arity = sig_.arity(name);
            for (const auto& t : tuples) {
                if (static_cast<int>(t.size()) != arity)
                    throw Error(ErrorKind::ArityMismatch,
                                "tuple of wrong arity in relation '" + name + "'");
                for (int e : t)
                    if (e < 0 || e >= size())
                        throw Error(ErrorKind::BadInput,
                                    "tuple entry out of range in relation '" + name + "'");
            }
        }
    }

    const Signature& sig() const { return sig_; }
    int size() const { return static_cast<int>(universe_.size()); }
    const std::vector<std::string>& universe() const { return universe_; }
    const std::string& element(int i) const { return universe_[static_cast<std::size_t>(i)]; }

    int index_of(const std::string& name) const {
        for (int i = 0; i < size(); ++i)
            if (universe_[static_cast<std::size_t>(i)] == name) return i;
        throw Error(ErrorKind::BadInput, "element '" + name + "' not in universe");
    }

    const TupleSet& relation(const std::string& name) const {
        auto it = interp_.find(name);
        if (it == interp_.end())
            throw Error(ErrorKind::UnknownSymbol, "relation '" + name + "' not interpreted");
        return it->second;
    }

    bool holds(const std::string& name, const Tuple& t) const {
        return relation(name).count(t) != 0;
    }

    const std::map<std::string, TupleSet>& interp() const { return interp_; }

private:
    Signature sig_;
    std::vector<std::string> universe_;
    std::map<std::string, TupleSet> interp_;
};

using Assignment = std::map<Variable, int>;

struct EvalOptions {
    const std::set<int>* p_extension = nullptr;  // interpretation of the scheme predicate
    const TupleSet* eq_relation = nullptr;       // replaces "=" (eta-semantics)
    const std::set<int>* domain = nullptr;       // quantifier relativization
};

// ---------------------------------------------------------------------------
// Tarskian satisfaction.
// ---------------------------------------------------------------------------

namespace detail {

struct Env {
    std::vector<std::pair<Variable, int>> stack;

    int lookup(const Variable& v) const {
        for (auto it = stack.rbegin(); it != stack.rend(); ++it)
            if (it->first == v) return it->second;
        throw Error(ErrorKind::UnboundVariable, "variable '" + v + "' is unbound");
    }
};

inline bool eval_rec(const FiniteStructure& m, const Formula& f, Env& env,
                     const EvalOptions& opts) {
    switch (f.kind()) {
        case FormulaKind::True: return true;
        case FormulaKind::False: return false;
        case FormulaKind::Eq: {
            int a = env.lookup(f.eq_left());
            int b = env.lookup(f.eq_right());
            if (opts.eq_relation) return opts.eq_relation->count({a, b}) != 0;
            return a == b;
        }
        case FormulaKind::Atom: {
            if (f.symbol() == kSchemePredicate) {
                if (!opts.p_extension)
                    throw Error(ErrorKind::UnknownSymbol,
                                "no interpretation provided for 'P'");
                return opts.p_extension->count(env.lookup(f.args()[0])) != 0;
            }
            Tuple t;
            t.reserve(f.args().size());
            for (const auto& v : f.args()) t.push_back(env.lookup(v));
            return m.holds(f.symbol(), t);
        }
        case FormulaKind::Not: return !eval_rec(m, f.child(), env, opts);
        case FormulaKind::And:
            return eval_rec(m, f.left(), env, opts) && eval_rec(m, f.right(), env, opts);
        case FormulaKind::Or:
            return eval_rec(m, f.left(), env, opts) || eval_rec(m, f.right(), env, opts);
        case FormulaKind::Implies:
            return !eval_rec(m, f.left(), env, opts) || eval_rec(m, f.right(), env, opts);
        case FormulaKind::Iff:
            return eval_rec(m, f.left(), env, opts) == eval_rec(m, f.right(), env, opts);
        case FormulaKind::Forall:
        case FormulaKind::Exists: {
            bool universal = f.kind() == FormulaKind::Forall;
            env.stack.emplace_back(f.bound_var(), 0);
            bool result = universal;
            for (int e = 0; e < m.size(); ++e) {
                if (opts.domain && !opts.domain->count(e)) continue;
                env.stack.back().second = e;
                bool v = eval_rec(m, f.child(), env, opts);
                if (universal && !v) { result = false; break; }
                if (!universal && v) { result = true; break; }
            }
            env.stack.pop_back();
            return result;
        }
    }
    return false;
}

} // namespace detail

inline bool eval(const FiniteStructure& m, const Formula& f, const Assignment& a = {},
                 const EvalOptions& opts = {}) {
    detail::Env env;
    for (const auto& [v, e] : a) env.stack.emplace_back(v, e);
    return detail::eval_rec(m, f, env, opts);
}

// Evaluation with "=" read as the extension of an equivalence formula
// (models without absolute equality).
inline bool eval_eta_semantics(const FiniteStructure& m, const Formula& f, const TupleSet& eq_rel,
                               const Assignment& a = {}) {
    EvalOptions opts;
    opts.eq_relation = &eq_rel;
    return eval(m, f, a, opts);
}

// ---------------------------------------------------------------------------
// Automorphisms and isomorphisms by backtracking over partial maps.
// ---------------------------------------------------------------------------

namespace detail {

// Partial maps extend elements in universe order; a candidate image is
// rejected as soon as some fully-mapped tuple disagrees.
inline bool partial_map_ok(const FiniteStructure& m1, const FiniteStructure& m2,
                           const std::vector<int>& img, int assigned) {
    for (const auto& [name, tuples] : m1.interp()) {
        const std::string& rel = name;
        int arity = m1.sig().arity(rel);
        Tuple probe(static_cast<std::size_t>(arity));
        auto walk = [&](auto&& self, int pos, Tuple& src) -> bool {
            if (pos == arity) {
                for (int i = 0; i < arity; ++i)
                    probe[static_cast<std::size_t>(i)] =
                        img[static_cast<std::size_t>(src[static_cast<std::size_t>(i)])];
                return m1.holds(rel, src) == m2.holds(rel, probe);
            }
            for (int e = 0; e < assigned; ++e) {
                src[static_cast<std::size_t>(pos)] = e;
                if (!self(self, pos + 1, src)) return false;
            }
            return true;
        };
        Tuple src(static_cast<std::size_t>(arity));
        if (!walk(walk, 0, src)) return false;
    }
    return true;
}

inline bool next_map(const FiniteStructure& m1, const FiniteStructure& m2, std::vector<int>& img,
                     std::vector<bool>& used, int depth, const std::function<bool(const std::vector<int>&)>& emit) {
    if (depth == m1.size()) return emit(img);
    for (int cand = 0; cand < m2.size(); ++cand) {
        if (used[static_cast<std::size_t>(cand)]) continue;
        img[static_cast<std::size_t>(depth)] = cand;
        used[static_cast<std::size_t>(cand)] = true;
        if (partial_map_ok(m1, m2, img, depth + 1))
            if (next_map(m1, m2, img, used, depth + 1, emit)) return true;
        used[static_cast<std::size_t>(cand)] = false;
    }
    return false;
}

} // namespace detail

// The full automorphism group, in lexicographic order of the image vector.
inline std::vector<std::vector<int>> automorphisms(const FiniteStructure& m) {
    std::vector<std::vector<int>> out;
    std::vector<int> img(static_cast<std::size_t>(m.size()), -1);
    std::vector<bool> used(static_cast<std::size_t>(m.size()), false);
    detail::next_map(m, m, img, used, 0, [&](const std::vector<int>& found) {
        out.push_back(found);
        return false;  // keep enumerating
    });
    return out;
}

// Some isomorphism m1 -> m2, or nullopt; deterministic given universe order.
inline std::optional<std::vector<int>> find_isomorphism(const FiniteStructure& m1,
                                                        const FiniteStructure& m2) {
    if (!(m1.sig() == m2.sig())) throw Error(ErrorKind::SignatureMismatch, "signatures differ");
    if (m1.size() != m2.size()) return std::nullopt;
    std::vector<int> img(static_cast<std::size_t>(m1.size()), -1);
    std::vector<bool> used(static_cast<std::size_t>(m1.size()), false);
    std::optional<std::vector<int>> result;
    detail::next_map(m1, m2, img, used, 0, [&](const std::vector<int>& found) {
        result = found;
        return true;  // stop at the first
    });
    return result;
}

// ---------------------------------------------------------------------------
// Invariant relations: all unions of Aut(m)-orbits on arity-tuples.
// On finite structures these are exactly the parameter-free definable
// relations.
// ---------------------------------------------------------------------------

namespace detail {

inline bool tuple_set_less(const TupleSet& a, const TupleSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace detail

inline std::vector<TupleSet> invariant_relations(const FiniteStructure& m, int arity,
                                                 const Caps& caps = {}) {
    if (arity < 1) throw Error(ErrorKind::InvalidArity, "arity must be >= 1");
    std::size_t total = 1;
    for (int i = 0; i < arity; ++i) {
        total *= static_cast<std::size_t>(m.size());
        if (total > caps.max_tuples)
            throw Error(ErrorKind::CapExceeded,
                        "tuple space exceeds cap of " + std::to_string(caps.max_tuples));
    }
    auto auts = automorphisms(m);

    std::vector<Tuple> all;
    Tuple t(static_cast<std::size_t>(arity), 0);
    auto gen = [&](auto&& self, int pos) -> void {
        if (pos == arity) {
            all.push_back(t);
            return;
        }
        for (int e = 0; e < m.size(); ++e) {
            t[static_cast<std::size_t>(pos)] = e;
            self(self, pos + 1);
        }
    };
    gen(gen, 0);

    std::map<Tuple, int> orbit_of;
    std::vector<TupleSet> orbits;
    for (const auto& seed : all) {
        if (orbit_of.count(seed)) continue;
        TupleSet orbit;
        std::vector<Tuple> frontier = {seed};
        orbit.insert(seed);
        while (!frontier.empty()) {
            Tuple cur = frontier.back();
            frontier.pop_back();
            for (const auto& g : auts) {
                Tuple img;
                img.reserve(cur.size());
                for (int e : cur) img.push_back(g[static_cast<std::size_t>(e)]);
                if (orbit.insert(img).second) frontier.push_back(img);
            }
        }
        int id = static_cast<int>(orbits.size());
        for (const auto& member : orbit) orbit_of[member] = id;
        orbits.push_back(std::move(orbit));
    }

    if (orbits.size() > caps.max_orbits)
        throw Error(ErrorKind::CapExceeded,
                    std::to_string(orbits.size()) + " orbits exceed cap of " +
                        std::to_string(caps.max_orbits));

    std::vector<TupleSet> unions;
    unions.reserve(std::size_t{1} << orbits.size());
    for (std::size_t mask = 0; mask < (std::size_t{1} << orbits.size()); ++mask) {
        TupleSet u;
        for (std::size_t k = 0; k < orbits.size(); ++k)
            if (mask & (std::size_t{1} << k)) u.insert(orbits[k].begin(), orbits[k].end());
        unions.push_back(std::move(u));
    }
    std::sort(unions.begin(), unions.end(), detail::tuple_set_less);
    return unions;
}

// ---------------------------------------------------------------------------
// Quotients by a definable congruence.
// ---------------------------------------------------------------------------

namespace detail {

struct Partition {
    std::vector<int> class_of;       // element -> class id
    std::vector<int> representative; // class id -> least element
};

// Validates that `rel` (as a set of pairs) is an equivalence on the listed
// elements and returns its partition, classes ordered by least member.
inline Partition partition_of(const TupleSet& rel, const std::vector<int>& elements,
                              const FiniteStructure& m) {
    auto related = [&](int a, int b) { return rel.count({a, b}) != 0; };
    for (int a : elements) {
        if (!related(a, a))
            throw Error(ErrorKind::NotEquivalence, "not reflexive at " + m.element(a));
        for (int b : elements) {
            if (related(a, b) && !related(b, a))
                throw Error(ErrorKind::NotEquivalence,
                            "not symmetric at (" + m.element(a) + ", " + m.element(b) + ")");
            for (int c : elements)
                if (related(a, b) && related(b, c) && !related(a, c))
                    throw Error(ErrorKind::NotEquivalence,
                                "not transitive at (" + m.element(a) + ", " + m.element(b) +
                                    ", " + m.element(c) + ")");
        }
    }
    Partition p;
    p.class_of.assign(static_cast<std::size_t>(m.size()), -1);
    for (int a : elements) {
        if (p.class_of[static_cast<std::size_t>(a)] != -1) continue;
        int id = static_cast<int>(p.representative.size());
        p.representative.push_back(a);
        for (int b : elements)
            if (related(a, b)) p.class_of[static_cast<std::size_t>(b)] = id;
    }
    return p;
}

inline void check_congruence(const FiniteStructure& m, const Partition& p) {
    for (const auto& [name, tuples] : m.interp()) {
        const std::string& rel = name;
        int arity = m.sig().arity(rel);
        for (const auto& t : tuples) {
            // any pointwise-related tuple must also be in the relation
            Tuple probe(static_cast<std::size_t>(arity));
            auto walk = [&](auto&& self, int pos) -> void {
                if (pos == arity) {
                    if (!m.holds(rel, probe)) {
                        std::string lhs, rhs;
                        for (int i = 0; i < arity; ++i) {
                            lhs += (i ? "," : "") + m.element(t[static_cast<std::size_t>(i)]);
                            rhs += (i ? "," : "") + m.element(probe[static_cast<std::size_t>(i)]);
                        }
                        throw Error(ErrorKind::NotCongruence,
                                    "relation '" + rel + "' holds at (" + lhs +
                                        ") but not at the related tuple (" + rhs + ")");
                    }
                    return;
                }
                int cls = p.class_of[static_cast<std::size_t>(t[static_cast<std::size_t>(pos)])];
                for (int e = 0; e < m.size(); ++e) {
                    if (p.class_of[static_cast<std::size_t>(e)] != cls) continue;
                    probe[static_cast<std::size_t>(pos)] = e;
                    self(self, pos + 1);
                }
            };
            walk(walk, 0);
        }
    }
}

inline FiniteStructure quotient_by_partition(const FiniteStructure& m, const Partition& p) {
    std::vector<std::string> universe;
    universe.reserve(p.representative.size());
    for (int rep : p.representative) universe.push_back(m.element(rep));
    std::map<std::string, TupleSet> interp;
    for (const auto& [name, tuples] : m.interp()) {
        TupleSet mapped;
        for (const auto& t : tuples) {
            Tuple q;
            q.reserve(t.size());
            for (int e : t) q.push_back(p.class_of[static_cast<std::size_t>(e)]);
            mapped.insert(std::move(q));
        }
        interp.emplace(name, std::move(mapped));
    }
    return FiniteStructure(m.sig(), std::move(universe), std::move(interp));
}

} // namespace detail

// Extension of a two-free-variable formula as a set of pairs. A closed
// formula is read as a constant relation (all pairs or none).
inline TupleSet binary_extension(const FiniteStructure& m, const Formula& f) {
    auto fv = free_vars(f);
    TupleSet out;
    if (fv.empty()) {
        if (!eval(m, f)) return out;
        for (int a = 0; a < m.size(); ++a)
            for (int b = 0; b < m.size(); ++b) out.insert({a, b});
        return out;
    }
    if (fv.size() != 2)
        throw Error(ErrorKind::BadInput,
                    "expected a formula with exactly 2 free variables, got " + print(f));
    for (int a = 0; a < m.size(); ++a)
        for (int b = 0; b < m.size(); ++b)
            if (eval(m, f, {{fv[0], a}, {fv[1], b}})) out.insert({a, b});
    return out;
}

// Collapses m along a definable congruence; evaluating any sentence in the
// quotient agrees with eta-semantics evaluation in m.
inline FiniteStructure quotient(const FiniteStructure& m, const Formula& eta) {
    TupleSet rel = binary_extension(m, eta);
    std::vector<int> elements;
    for (int e = 0; e < m.size(); ++e) elements.push_back(e);
    detail::Partition p = detail::partition_of(rel, elements, m);
    detail::check_congruence(m, p);
    return detail::quotient_by_partition(m, p);
}

// ---------------------------------------------------------------------------
// Internal models: the structure carved out of m by a translation.
// ---------------------------------------------------------------------------

struct TranslationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    bool clean() const { return violations.empty(); }
};

namespace detail {

inline Assignment tuple_assignment(const std::vector<Variable>& vars, const Tuple& values) {
    Assignment a;
    for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = values[i];
    return a;
}

inline std::vector<Tuple> all_tuples(int universe, int len) {
    std::vector<Tuple> out;
    Tuple t(static_cast<std::size_t>(len), 0);
    auto gen = [&](auto&& self, int pos) -> void {
        if (pos == len) {
            out.push_back(t);
            return;
        }
        for (int e = 0; e < universe; ++e) {
            t[static_cast<std::size_t>(pos)] = e;
            self(self, pos + 1);
        }
    };
    gen(gen, 0);
    return out;
}

} // namespace detail

// Semantic validation of a translation against a model: the two side
// conditions of the translation definition, plus that eta is an equivalence
// on delta-tuples and a congruence for each phi_R.
inline TranslationReport validate_on_model(const Translation& t, const FiniteStructure& m) {
    TranslationReport report;
    const int n = t.dim();
    auto dvars = t.expected_delta_vars();
    auto evars = t.expected_eta_vars();

    auto tuples = detail::all_tuples(m.size(), n);
    std::vector<bool> in_delta(tuples.size());
    for (std::size_t i = 0; i < tuples.size(); ++i)
        in_delta[i] = eval(m, t.delta(), detail::tuple_assignment(dvars, tuples[i]));

    auto name_of = [&](const Tuple& tup) {
        std::string out = "(";
        for (std::size_t i = 0; i < tup.size(); ++i)
            out += (i ? "," : "") + m.element(tup[i]);
        return out + ")";
    };

    auto eta_holds = [&](const Tuple& a, const Tuple& b) {
        Tuple joined = a;
        joined.insert(joined.end(), b.begin(), b.end());
        return eval(m, t.eta(), detail::tuple_assignment(evars, joined));
    };

    // side condition: eta(x1,x2) -> delta(x1) & delta(x2)
    for (std::size_t i = 0; i < tuples.size(); ++i)
        for (std::size_t j = 0; j < tuples.size(); ++j)
            if (eta_holds(tuples[i], tuples[j]) && (!in_delta[i] || !in_delta[j]))
                report.violations.push_back("eta relates " + name_of(tuples[i]) + " and " +
                                            name_of(tuples[j]) + " outside the domain");

    // side condition: phi_R(...) -> pointwise delta
    for (const auto& [name, arity] : t.source_sig().relations()) {
        auto rvars = t.expected_rel_vars(arity);
        for (const auto& flat : detail::all_tuples(m.size(), arity * n)) {
            if (!eval(m, t.rel_formula(name), detail::tuple_assignment(rvars, flat))) continue;
            for (int slot = 0; slot < arity; ++slot) {
                Tuple part(flat.begin() + slot * n, flat.begin() + (slot + 1) * n);
                auto it = std::find(tuples.begin(), tuples.end(), part);
                if (!in_delta[static_cast<std::size_t>(it - tuples.begin())]) {
                    report.violations.push_back("phi_" + name + " holds at a tuple whose slot " +
                                                std::to_string(slot + 1) + " " + name_of(part) +
                                                " is outside the domain");
                    break;
                }
            }
        }
    }  // (no lambdas touch the bindings above)

    // eta must be an equivalence on delta-tuples
    std::vector<std::size_t> dom;
    for (std::size_t i = 0; i < tuples.size(); ++i)
        if (in_delta[i]) dom.push_back(i);
    if (dom.empty()) report.warnings.push_back("delta carves out an empty domain");
    for (auto i : dom) {
        if (!eta_holds(tuples[i], tuples[i]))
            report.violations.push_back("eta not reflexive at " + name_of(tuples[i]));
        for (auto j : dom) {
            if (eta_holds(tuples[i], tuples[j]) && !eta_holds(tuples[j], tuples[i]))
                report.violations.push_back("eta not symmetric at " + name_of(tuples[i]) + ", " +
                                            name_of(tuples[j]));
            for (auto k : dom)
                if (eta_holds(tuples[i], tuples[j]) && eta_holds(tuples[j], tuples[k]) &&
                    !eta_holds(tuples[i], tuples[k]))
                    report.violations.push_back("eta not transitive at " + name_of(tuples[i]) +
                                                ", " + name_of(tuples[j]) + ", " +
                                                name_of(tuples[k]));
        }
    }

    // eta must be a congruence for each phi_R on delta-tuples
    for (const auto& [name, arity] : t.source_sig().relations()) {
        const std::string& rel = name;
        const int ar = arity;
        auto rvars = t.expected_rel_vars(ar);
        auto rel_holds = [&](const std::vector<std::size_t>& slots) {
            Tuple flat;
            for (auto s : slots) flat.insert(flat.end(), tuples[s].begin(), tuples[s].end());
            return eval(m, t.rel_formula(rel), detail::tuple_assignment(rvars, flat));
        };
        std::vector<std::size_t> slots(static_cast<std::size_t>(ar), 0);
        auto walk = [&](auto&& self, int pos) -> void {
            if (pos == ar) {
                if (!rel_holds(slots)) return;
                // vary one slot at a time along eta
                for (int s = 0; s < ar; ++s) {
                    auto varied = slots;
                    for (auto j : dom) {
                        if (j == slots[static_cast<std::size_t>(s)]) continue;
                        if (!eta_holds(tuples[slots[static_cast<std::size_t>(s)]], tuples[j]))
                            continue;
                        varied[static_cast<std::size_t>(s)] = j;
                        if (!rel_holds(varied)) {
                            report.violations.push_back(
                                "phi_" + rel + " is not eta-invariant: slot " +
                                std::to_string(s + 1) + " " +
                                name_of(tuples[slots[static_cast<std::size_t>(s)]]) +
                                " ~ " + name_of(tuples[j]) + " changes the value");
                            return;
                        }
                    }
                }
                return;
            }
            for (auto i : dom) {
                slots[static_cast<std::size_t>(pos)] = i;
                self(self, pos + 1);
            }
        };
        if (!dom.empty()) walk(walk, 0);
    }

    return report;
}

// The structure carved out of m by t: universe = delta-satisfying n-tuples,
// relations from phi_R, equality from eta. With quotient_eta the eta-quotient
// with absolute equality is returned (requires a clean validation report).
struct InternalModel {
    FiniteStructure structure;
    TupleSet eta;  // equality on structure's universe; diagonal iff quotiented
    bool quotiented;

    bool satisfies(const Formula& sentence) const {
        if (quotiented) return eval(structure, sentence);
        return eval_eta_semantics(structure, sentence, eta);
    }
};

inline InternalModel internal_model(const FiniteStructure& m, const Translation& t,
                                    bool quotient_eta = true) {
    if (quotient_eta) {
        auto report = validate_on_model(t, m);
        if (!report.clean())
            throw Error(ErrorKind::BadInput,
                        "translation invalid on model: " + report.violations.front());
    }
    const int n = t.dim();
    auto dvars = t.expected_delta_vars();
    std::vector<Tuple> universe_tuples;
    for (const auto& tup : detail::all_tuples(m.size(), n))
        if (eval(m, t.delta(), detail::tuple_assignment(dvars, tup)))
            universe_tuples.push_back(tup);
    if (universe_tuples.empty())
        throw Error(ErrorKind::EmptyDomain, "delta carves out an empty domain");

    std::vector<std::string> names;
    for (const auto& tup : universe_tuples) {
        if (n == 1) names.push_back(m.element(tup[0]));
        else {
            std::string nm = "(";
            for (std::size_t i = 0; i < tup.size(); ++i)
                nm += (i ? "," : "") + m.element(tup[i]);
            names.push_back(nm + ")");
        }
    }

    std::map<std::string, TupleSet> interp;
    for (const auto& [name, arity] : t.source_sig().relations()) {
        const std::string& rel_name = name;
        const int ar = arity;
        auto rvars = t.expected_rel_vars(ar);
        TupleSet rel;
        Tuple idx(static_cast<std::size_t>(ar), 0);
        auto walk = [&](auto&& self, int pos) -> void {
            if (pos == ar) {
                Tuple flat;
                for (int i : idx) {
                    const auto& tt = universe_tuples[static_cast<std::size_t>(i)];
                    flat.insert(flat.end(), tt.begin(), tt.end());
                }
                if (eval(m, t.rel_formula(rel_name), detail::tuple_assignment(rvars, flat)))
                    rel.insert(idx);
                return;
            }
            for (int i = 0; i < static_cast<int>(universe_tuples.size()); ++i) {
                idx[static_cast<std::size_t>(pos)] = i;
                self(self, pos + 1);
            }
        };
        walk(walk, 0);
        interp.emplace(rel_name, std::move(rel));
    }

    auto evars = t.expected_eta_vars();
    TupleSet eta_rel;
    for (int i = 0; i < static_cast<int>(universe_tuples.size()); ++i)
        for (int j = 0; j < static_cast<int>(universe_tuples.size()); ++j) {
            Tuple joined = universe_tuples[static_cast<std::size_t>(i)];
            const auto& rt = universe_tuples[static_cast<std::size_t>(j)];
            joined.insert(joined.end(), rt.begin(), rt.end());
            if (eval(m, t.eta(), detail::tuple_assignment(evars, joined))) eta_rel.insert({i, j});
        }

    FiniteStructure carved(t.source_sig(), std::move(names), std::move(interp));
    if (!quotient_eta) return InternalModel{std::move(carved), std::move(eta_rel), false};

    std::vector<int> elements;
    for (int e = 0; e < carved.size(); ++e) elements.push_back(e);
    detail::Partition p = detail::partition_of(eta_rel, elements, carved);
    detail::check_congruence(carved, p);
    FiniteStructure quotiented = detail::quotient_by_partition(carved, p);
    TupleSet diag;
    for (int e = 0; e < quotiented.size(); ++e) diag.insert({e, e});
    return InternalModel{std::move(quotiented), std::move(diag), true};
}

// ---------------------------------------------------------------------------
// Ehrenfeucht-Fraisse games.
// ---------------------------------------------------------------------------

enum class EfWinner { Duplicator, Spoiler };

struct EfMove {
    int round;
    int side;  // 0 = left structure, 1 = right
    std::string spoiler_pick;
    std::string duplicator_reply;
};

struct EfResult {
    EfWinner winner;
    std::vector<EfMove> trace;  // a winning Spoiler line when Spoiler wins
};

namespace detail {

using PairList = std::vector<std::pair<int, int>>;

inline bool pairs_partial_iso(const FiniteStructure& m1, const FiniteStructure& m2,
                              const PairList& pairs) {
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            if ((pairs[i].first == pairs[j].first) != (pairs[i].second == pairs[j].second))
                return false;
        }
    for (const auto& [name, arity] : m1.sig().relations()) {
        const std::string& rel = name;
        const int ar = arity;
        std::vector<std::size_t> sel(static_cast<std::size_t>(ar), 0);
        auto walk = [&](auto&& self, int pos) -> bool {
            if (pos == ar) {
                Tuple a, b;
                for (auto s : sel) {
                    a.push_back(pairs[s].first);
                    b.push_back(pairs[s].second);
                }
                return m1.holds(rel, a) == m2.holds(rel, b);
            }
            for (std::size_t s = 0; s < pairs.size(); ++s) {
                sel[static_cast<std::size_t>(pos)] = s;
                if (!self(self, pos + 1)) return false;
            }
            return true;
        };
        if (!pairs.empty() && !walk(walk, 0)) return false;
    }
    return true;
}

struct EfSolver {
    const FiniteStructure& m1;
    const FiniteStructure& m2;
    std::map<std::pair<PairList, int>, bool> memo;  // canonical (sorted unique) pairs

    bool duplicator_wins(PairList pairs, int rounds) {
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        auto key = std::make_pair(pairs, rounds);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        bool result;
        if (!pairs_partial_iso(m1, m2, pairs)) {
            result = false;
        } else if (rounds == 0) {
            result = true;
        } else {
            result = true;
            for (int side = 0; side < 2 && result; ++side) {
                int limit = side == 0 ? m1.size() : m2.size();
                for (int pick = 0; pick < limit && result; ++pick) {
                    bool answered = false;
                    int reply_limit = side == 0 ? m2.size() : m1.size();
                    for (int reply = 0; reply < reply_limit && !answered; ++reply) {
                        PairList next = pairs;
                        next.emplace_back(side == 0 ? pick : reply, side == 0 ? reply : pick);
                        if (duplicator_wins(std::move(next), rounds - 1)) answered = true;
                    }
                    if (!answered) result = false;
                }
            }
        }
        memo[key] = result;
        return result;
    }

    // Reconstructs a Spoiler winning line from a lost position.
    void spoiler_line(PairList pairs, int rounds, int round_no, std::vector<EfMove>& out) {
        if (rounds == 0 || !pairs_partial_iso(m1, m2, pairs)) return;
        for (int side = 0; side < 2; ++side) {
            int limit = side == 0 ? m1.size() : m2.size();
            for (int pick = 0; pick < limit; ++pick) {
                bool answered = false;
                int reply_limit = side == 0 ? m2.size() : m1.size();
                for (int reply = 0; reply < reply_limit; ++reply) {
                    PairList next = pairs;
                    next.emplace_back(side == 0 ? pick : reply, side == 0 ? reply : pick);
                    if (duplicator_wins(next, rounds - 1)) { answered = true; break; }
                }
                if (!answered) {
                    // every reply loses; record the canonical first reply
                    PairList next = pairs;
                    int reply = 0;
                    next.emplace_back(side == 0 ? pick : reply, side == 0 ? reply : pick);
                    out.push_back(EfMove{round_no, side,
                                         side == 0 ? m1.element(pick) : m2.element(pick),
                                         side == 0 ? m2.element(reply) : m1.element(reply)});
                    spoiler_line(std::move(next), rounds - 1, round_no + 1, out);
                    return;
                }
            }
        }
    }
};

} // namespace detail

// Exact k-round game value by memoized search over positions (sets of pairs).
inline EfResult ef_game(const FiniteStructure& m1, const FiniteStructure& m2, int k) {
    if (!(m1.sig() == m2.sig())) throw Error(ErrorKind::SignatureMismatch, "signatures differ");
    if (k < 0) throw Error(ErrorKind::BadInput, "rounds must be >= 0");
    detail::EfSolver solver{m1, m2, {}};
    bool dup = solver.duplicator_wins({}, k);
    EfResult result{dup ? EfWinner::Duplicator : EfWinner::Spoiler, {}};
    if (!dup) solver.spoiler_line({}, k, 1, result.trace);
    return result;
}

// ---------------------------------------------------------------------------
// Back-and-forth systems.
// ---------------------------------------------------------------------------

struct BackAndForthSystem {
    // partial maps as sorted lists of (left element, right element) pairs
    std::vector<detail::PairList> maps;

    BackAndForthSystem(const FiniteStructure& m1, const FiniteStructure& m2,
                       std::vector<detail::PairList> maps_in)
        : maps(std::move(maps_in)) {
        std::set<detail::PairList> index(maps.begin(), maps.end());
        for (const auto& f : maps) {
            if (!detail::pairs_partial_iso(m1, m2, f))
                throw Error(ErrorKind::BadInput,
                            "back-and-forth member does not preserve quantifier-free types");
            for (int a = 0; a < m1.size(); ++a) {
                bool extendable = false;
                for (int b = 0; b < m2.size() && !extendable; ++b) {
                    auto g = f;
                    g.emplace_back(a, b);
                    std::sort(g.begin(), g.end());
                    g.erase(std::unique(g.begin(), g.end()), g.end());
                    if (index.count(g)) extendable = true;
                }
                if (!extendable)
                    throw Error(ErrorKind::BadInput, "forth extension property fails");
            }
            for (int b = 0; b < m2.size(); ++b) {
                bool extendable = false;
                for (int a = 0; a < m1.size() && !extendable; ++a) {
                    auto g = f;
                    g.emplace_back(a, b);
                    std::sort(g.begin(), g.end());
                    g.erase(std::unique(g.begin(), g.end()), g.end());
                    if (index.count(g)) extendable = true;
                }
                if (!extendable)
                    throw Error(ErrorKind::BadInput, "back extension property fails");
            }
        }
    }
};

// Greatest back-and-forth system containing the empty map, as a decreasing
// fixpoint over partial isomorphisms; nullopt when the empty map is expelled.
// For finite structures a nonempty result is equivalent to isomorphism.
inline std::optional<BackAndForthSystem> bf_system(const FiniteStructure& m1,
                                                   const FiniteStructure& m2,
                                                   const Caps& caps = {}) {
    if (!(m1.sig() == m2.sig())) throw Error(ErrorKind::SignatureMismatch, "signatures differ");

    // all partial injective maps that are partial isomorphisms
    std::set<detail::PairList> live;
    detail::PairList current;
    std::vector<bool> used_l(static_cast<std::size_t>(m1.size()), false);
    std::vector<bool> used_r(static_cast<std::size_t>(m2.size()), false);
    auto gen = [&](auto&& self, int next_left) -> void {
        if (live.size() > caps.max_partial_maps)
            throw Error(ErrorKind::CapExceeded, "too many partial maps");
        auto sorted = current;
        std::sort(sorted.begin(), sorted.end());
        if (detail::pairs_partial_iso(m1, m2, sorted)) live.insert(sorted);
        else return;  // extensions of a non-embedding stay non-embeddings
        for (int a = next_left; a < m1.size(); ++a) {
            if (used_l[static_cast<std::size_t>(a)]) continue;
            for (int b = 0; b < m2.size(); ++b) {
                if (used_r[static_cast<std::size_t>(b)]) continue;
                used_l[static_cast<std::size_t>(a)] = used_r[static_cast<std::size_t>(b)] = true;
                current.emplace_back(a, b);
                self(self, a + 1);
                current.pop_back();
                used_l[static_cast<std::size_t>(a)] = used_r[static_cast<std::size_t>(b)] = false;
            }
        }
    };
    gen(gen, 0);

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<detail::PairList> doomed;
        for (const auto& f : live) {
            bool ok = true;
            for (int a = 0; a < m1.size() && ok; ++a) {
                bool ext = false;
                for (int b = 0; b < m2.size() && !ext; ++b) {
                    auto g = f;
                    g.emplace_back(a, b);
                    std::sort(g.begin(), g.end());
                    g.erase(std::unique(g.begin(), g.end()), g.end());
                    if (live.count(g)) ext = true;
                }
                if (!ext) ok = false;
            }
            for (int b = 0; b < m2.size() && ok; ++b) {
                bool ext = false;
                for (int a = 0; a < m1.size() && !ext; ++a) {
                    auto g = f;
                    g.emplace_back(a, b);
                    std::sort(g.begin(), g.end());
                    g.erase(std::unique(g.begin(), g.end()), g.end());
                    if (live.count(g)) ext = true;
                }
                if (!ext) ok = false;
            }
            if (!ok) doomed.push_back(f);
        }
        for (const auto& f : doomed) {
            live.erase(f);
            changed = true;
        }
    }

    if (!live.count({})) return std::nullopt;
    return BackAndForthSystem(m1, m2, std::vector<detail::PairList>(live.begin(), live.end()));
}

// ---------------------------------------------------------------------------
// Strong models.
// ---------------------------------------------------------------------------

struct StrongModelReport {
    bool ok;
    std::optional<std::set<int>> counterexample;  // first failing Y in canonical order
};

namespace detail {

// Subsets in canonical counterexample order: increasing size, then
// lexicographic on the ordered universe.
inline std::vector<std::set<int>> canonical_subsets(const std::vector<std::set<int>>& classes) {
    std::vector<std::set<int>> out;
    out.reserve(std::size_t{1} << classes.size());
    for (std::size_t mask = 0; mask < (std::size_t{1} << classes.size()); ++mask) {
        std::set<int> y;
        for (std::size_t k = 0; k < classes.size(); ++k)
            if (mask & (std::size_t{1} << k)) y.insert(classes[k].begin(), classes[k].end());
        out.push_back(std::move(y));
    }
    std::sort(out.begin(), out.end(), [](const std::set<int>& a, const std::set<int>& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });
    return out;
}

} // namespace detail

// Enumerates every eq-invariant subset Y of the universe and reports the
// first Y with (m, Y) |/= tau.body, if any. With eq_symbol given, "=" is
// evaluated as that equivalence (eta-semantics).
inline StrongModelReport strong_model_check(const FiniteStructure& m,
                                            const std::optional<std::string>& eq_symbol,
                                            const Scheme& tau, const Caps& caps = {}) {
    for (const auto& [name, arity] : tau.sig.relations())
        if (!m.sig().has(name) || m.sig().arity(name) != arity)
            throw Error(ErrorKind::SignatureMismatch,
                        "model does not interpret '" + name + "' with the scheme's arity");

    const TupleSet* eq_rel = nullptr;
    TupleSet eq_store;
    std::vector<std::set<int>> classes;
    if (eq_symbol) {
        if (!m.sig().has(*eq_symbol) || m.sig().arity(*eq_symbol) != 2)
            throw Error(ErrorKind::BadInput, "eq symbol must name a binary relation of the model");
        eq_store = m.relation(*eq_symbol);
        std::vector<int> elements;
        for (int e = 0; e < m.size(); ++e) elements.push_back(e);
        detail::Partition p = detail::partition_of(eq_store, elements, m);
        for (std::size_t c = 0; c < p.representative.size(); ++c) {
            std::set<int> cls;
            for (int e = 0; e < m.size(); ++e)
                if (p.class_of[static_cast<std::size_t>(e)] == static_cast<int>(c)) cls.insert(e);
            classes.push_back(std::move(cls));
        }
        eq_rel = &eq_store;
    } else {
        for (int e = 0; e < m.size(); ++e) classes.push_back({e});
    }

    if (classes.size() > caps.max_invariant_classes)
        throw Error(ErrorKind::CapExceeded,
                    std::to_string(classes.size()) + " invariant classes exceed cap of " +
                        std::to_string(caps.max_invariant_classes));

    for (const auto& y : detail::canonical_subsets(classes)) {
        EvalOptions opts;
        opts.p_extension = &y;
        opts.eq_relation = eq_rel;
        if (!eval(m, tau.body, {}, opts)) return StrongModelReport{false, y};
    }
    return StrongModelReport{true, std::nullopt};
}

} // namespace wb
