#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wb/error.hpp"
#include "wb/syntax.hpp"

// Schemes (sentences over L u {P} with the marked unary predicate),
// theories, instance generation, and the concrete scheme builders.

namespace wb {

struct Scheme {
    Signature sig;
    Formula body;  // over sig u {P}; closed except for P

    Scheme(Signature sig_, Formula body_) : sig(std::move(sig_)), body(std::move(body_)) {
        check_well_formed(body, sig, /*allow_p=*/true);
        if (!is_closed(body))
            throw Error(ErrorKind::BadInput,
                        "scheme body has free variables: " + print(body));
    }
};

struct Theory {
    Signature sig;
    std::vector<Formula> axioms;

    Theory(Signature sig_, std::vector<Formula> axioms_)
        : sig(std::move(sig_)), axioms(std::move(axioms_)) {
        for (const auto& ax : axioms) {
            check_well_formed(ax, sig, /*allow_p=*/false);
            if (!is_closed(ax))
                throw Error(ErrorKind::BadInput, "theory axiom not closed: " + print(ax));
        }
    }
};

// The substituted-formula side of Definition "instance of a scheme":
// universal closure of the body with phi(pivot, params) put in for P.
inline Formula mk_instance(const Scheme& s, const Formula& phi, const Variable& pivot) {
    check_well_formed(phi, s.sig, /*allow_p=*/false);
    return universal_closure(substitute_predicate(s.body, phi, pivot));
}

inline bool instance_is_parameter_free(const Formula& phi) {
    return free_vars(phi).size() == 1;
}

// ---------------------------------------------------------------------------
// Formula enumeration by AST size.
//
// Size counts operator nodes: True/False/Eq/Atom = 1, Not = 1 + body,
// binary connectives = 1 + left + right, quantifiers = 2 + body (binder
// plus bound-variable occurrence). Quantifiers bind q0, q1, ... in nesting
// order; free variables come from the caller's scope list.
// ---------------------------------------------------------------------------

namespace detail {

inline void enumerate_formulas_rec(const Signature& sig, int size,
                                   const std::vector<Variable>& scope, int depth,
                                   std::vector<Formula>& out) {
    if (size < 1) return;
    if (size == 1) {
        out.push_back(truth());
        out.push_back(falsity());
        for (const auto& a : scope)
            for (const auto& b : scope) out.push_back(eq(a, b));
        for (const auto& [name, arity] : sig.relations()) {
            const std::string& rel = name;
            const int ar = arity;
            // all argument tuples from scope
            std::vector<Variable> args(static_cast<std::size_t>(ar));
            auto fill = [&](auto&& self, int pos) -> void {
                if (pos == ar) {
                    out.push_back(atom(rel, args));
                    return;
                }
                for (const auto& v : scope) {
                    args[static_cast<std::size_t>(pos)] = v;
                    self(self, pos + 1);
                }
            };
            if (!scope.empty()) fill(fill, 0);
        }
        return;
    }
    // negation: 1 + body
    {
        std::vector<Formula> inner;
        enumerate_formulas_rec(sig, size - 1, scope, depth, inner);
        for (auto& f : inner) out.push_back(lnot(f));
    }
    // quantifier: 2 + body
    if (size >= 3) {
        Variable bound = "q" + std::to_string(depth);
        std::vector<Variable> extended = scope;
        extended.push_back(bound);
        std::vector<Formula> quantified;
        enumerate_formulas_rec(sig, size - 2, extended, depth + 1, quantified);
        for (auto& f : quantified) {
            out.push_back(forall(bound, f));
            out.push_back(exists(bound, f));
        }
    }
    // binary: 1 + l + r
    for (int l = 1; l <= size - 2; ++l) {
        int r = size - 1 - l;
        std::vector<Formula> lhs, rhs;
        enumerate_formulas_rec(sig, l, scope, depth, lhs);
        enumerate_formulas_rec(sig, r, scope, depth, rhs);
        for (const auto& a : lhs)
            for (const auto& b : rhs) {
                out.push_back(land(a, b));
                out.push_back(lor(a, b));
                out.push_back(implies(a, b));
                out.push_back(iff(a, b));
            }
    }
}

} // namespace detail

// All formulas over sig with AST size exactly <= max_size and free variables
// among `scope`, deduplicated by alpha-equality.
inline std::vector<Formula> enumerate_formulas(const Signature& sig, int max_size,
                                               const std::vector<Variable>& scope) {
    std::vector<Formula> raw;
    for (int s = 1; s <= max_size; ++s) detail::enumerate_formulas_rec(sig, s, scope, 0, raw);
    std::vector<Formula> out;
    std::set<std::string> seen;
    for (auto& f : raw)
        if (seen.insert(alpha_key(f)).second) out.push_back(std::move(f));
    return out;
}

// Finite truncation of the instance set: all instances whose substituted phi
// has AST size <= max_depth, pivot "x", parameters drawn from {y, z},
// deduplicated by alpha-equality of the resulting sentences.
inline std::vector<Formula> instances_up_to(const Scheme& s, int max_depth, bool pf_only) {
    if (max_depth < 1) throw Error(ErrorKind::InvalidDepth, "max_depth must be >= 1");
    const Variable pivot = "x";
    std::vector<Variable> scope = {pivot};
    if (!pf_only) {
        scope.push_back("y");
        scope.push_back("z");
    }
    std::vector<Formula> out;
    std::set<std::string> seen;
    for (const auto& phi : enumerate_formulas(s.sig, max_depth, scope)) {
        auto fv = free_vars(phi);
        bool pivot_free = std::find(fv.begin(), fv.end(), pivot) != fv.end();
        if (!pivot_free) continue;
        if (pf_only && fv.size() != 1) continue;
        Formula inst = mk_instance(s, phi, pivot);
        if (seen.insert(alpha_key(inst)).second) out.push_back(std::move(inst));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Concrete builders.
// ---------------------------------------------------------------------------

// Relationalized arithmetical induction over {Zero:1, Succ:2}:
//   (all z.(Zero(z)->P(z)) & all x. all y.((P(x)&Succ(x,y))->P(y))) -> all x. P(x)
inline Scheme build_ind() {
    Signature sig(std::map<std::string, int>{{"Zero", 1}, {"Succ", 2}});
    Formula base = forall("z", implies(atom("Zero", {"z"}), atom(kSchemePredicate, {"z"})));
    Formula step = forall(
        "x", forall("y", implies(land(atom(kSchemePredicate, {"x"}), atom("Succ", {"x", "y"})),
                                 atom(kSchemePredicate, {"y"}))));
    Formula concl = forall("x", atom(kSchemePredicate, {"x"}));
    return Scheme(sig, implies(land(base, step), concl));
}

// One-sorted comprehension over {Obj:1, Cls:1, In:2}:
//   ex y.(Cls(y) & all x.(Obj(x) -> (In(x,y) <-> P(x))))
inline Scheme build_com() {
    Signature sig(std::map<std::string, int>{{"Obj", 1}, {"Cls", 1}, {"In", 2}});
    Formula body = exists(
        "y", land(atom("Cls", {"y"}),
                  forall("x", implies(atom("Obj", {"x"}),
                                      iff(atom("In", {"x", "y"}),
                                          atom(kSchemePredicate, {"x"}))))));
    return Scheme(sig, body);
}

namespace detail {

// S(f,c) with the satisfaction predicate read through P on pair codes:
//   ex p. (Pair(f,c,p) & P(p))
inline Formula sat_holds(const Variable& formula_var, const Variable& env_var,
                         const Variable& pair_var) {
    return exists(pair_var, land(atom("Pair", {formula_var, env_var, pair_var}),
                                 atom(kSchemePredicate, {pair_var})));
}

} // namespace detail

// Conjunction of the four compositional satisfaction clauses (atomic,
// existential, conjunction, negation), with formula/assignment coding left
// to uninterpreted predicates Form, Atomf, ExQ, Conj, Neg, Pair, AtSat.
inline Scheme build_sat(const Signature& base_sig) {
    Signature coding(std::map<std::string, int>{{"Form", 1},
                                                {"Atomf", 1},
                                                {"ExQ", 2},
                                                {"Conj", 3},
                                                {"Neg", 2},
                                                {"Pair", 3},
                                                {"AtSat", 2}});
    Signature sig = base_sig.merged(coding);
    using detail::sat_holds;
    Formula atomic = forall(
        "f", forall("c", implies(land(atom("Form", {"f"}), atom("Atomf", {"f"})),
                                 iff(sat_holds("f", "c", "p"), atom("AtSat", {"f", "c"})))));
    Formula existential = forall(
        "f",
        forall("g",
               forall("c", implies(land(atom("Form", {"f"}), atom("ExQ", {"f", "g"})),
                                   iff(sat_holds("f", "c", "p"),
                                       exists("d", exists("e", land(atom("Pair", {"c", "d", "e"}),
                                                                    sat_holds("g", "e", "p")))))))));
    Formula conjunction = forall(
        "f",
        forall("g",
               forall("h",
                      forall("c", implies(land(atom("Form", {"f"}), atom("Conj", {"f", "g", "h"})),
                                          iff(sat_holds("f", "c", "p"),
                                              land(sat_holds("g", "c", "p"),
                                                   sat_holds("h", "c", "p"))))))));
    Formula negation = forall(
        "f", forall("g", forall("c", implies(land(atom("Form", {"f"}), atom("Neg", {"f", "g"})),
                                             iff(sat_holds("f", "c", "p"),
                                                 lnot(sat_holds("g", "c", "p")))))));
    Formula body = land(land(land(atomic, existential), conjunction), negation);
    return Scheme(sig, body);
}

// "P is not a satisfaction predicate": the negation of build_sat under P.
inline Scheme build_tarski(const Signature& base_sig) {
    Scheme sat = build_sat(base_sig);
    return Scheme(sat.sig, lnot(sat.body));
}

// alpha -> all x.(Q(x) -> P(x)), as a scheme over alpha's language plus Q.
inline Scheme build_mu(const Scheme& alpha, const std::string& q) {
    if (alpha.sig.has(q) || q == kSchemePredicate)
        throw Error(ErrorKind::SymbolClash, "symbol '" + q + "' already in use");
    Signature sig = alpha.sig.merged(Signature(std::map<std::string, int>{{q, 1}}));
    Formula body = implies(alpha.body,
                           forall("x", implies(atom(q, {"x"}), atom(kSchemePredicate, {"x"}))));
    return Scheme(sig, body);
}

// The dual: alpha -> all x.(P(x) -> Q(x)).
inline Scheme build_nu(const Scheme& alpha, const std::string& q) {
    if (alpha.sig.has(q) || q == kSchemePredicate)
        throw Error(ErrorKind::SymbolClash, "symbol '" + q + "' already in use");
    Signature sig = alpha.sig.merged(Signature(std::map<std::string, int>{{q, 1}}));
    Formula body = implies(alpha.body,
                           forall("x", implies(atom(kSchemePredicate, {"x"}), atom(q, {"x"}))));
    return Scheme(sig, body);
}

// Adjunctive set theory: empty set plus adjunction, over {In:2}.
inline Theory build_as() {
    Signature sig(std::map<std::string, int>{{"In", 2}});
    Formula empty_set = exists("a", forall("x", lnot(atom("In", {"x", "a"}))));
    Formula adjunction = forall(
        "a", forall("b", exists("c", forall("x", iff(atom("In", {"x", "c"}),
                                                     lor(atom("In", {"x", "a"}),
                                                         eq("x", "b")))))));
    return Theory(sig, {empty_set, adjunction});
}

// Dense linear orders without endpoints over {Less:2}.
inline Theory build_dlo() {
    Signature sig(std::map<std::string, int>{{"Less", 2}});
    std::vector<Formula> axioms;
    axioms.push_back(forall("x", lnot(atom("Less", {"x", "x"}))));
    axioms.push_back(forall(
        "x", forall("y", forall("z", implies(land(atom("Less", {"x", "y"}),
                                                  atom("Less", {"y", "z"})),
                                             atom("Less", {"x", "z"}))))));
    axioms.push_back(forall(
        "x", forall("y", lor(atom("Less", {"x", "y"}),
                             lor(eq("x", "y"), atom("Less", {"y", "x"}))))));
    axioms.push_back(forall(
        "x", forall("y", implies(atom("Less", {"x", "y"}),
                                 exists("z", land(atom("Less", {"x", "z"}),
                                                  atom("Less", {"z", "y"})))))));
    axioms.push_back(forall("x", exists("y", atom("Less", {"x", "y"}))));
    axioms.push_back(forall("x", exists("y", atom("Less", {"y", "x"}))));
    return Theory(sig, axioms);
}

// ---------------------------------------------------------------------------
// The hereditarily-finite-sets scheme builder.
// ---------------------------------------------------------------------------

namespace detail {

// p codes the Kuratowski pair {{x},{x,y}} (membership-extensionally).
inline Formula kuratowski_pair(const Variable& x, const Variable& y, const Variable& p) {
    Formula singleton = forall("u", iff(atom("In", {"u", "s"}), eq("u", x)));
    Formula doubleton = forall("u", iff(atom("In", {"u", "d"}), lor(eq("u", x), eq("u", y))));
    Formula members = forall("w", implies(atom("In", {"w", p}), lor(eq("w", "s"), eq("w", "d"))));
    return exists("s",
                  exists("d", land(land(land(land(atom("In", {"s", p}), atom("In", {"d", p})),
                                             members),
                                        singleton),
                                   doubleton)));
}

// The class P, read as a class of pair codes, relates x to y.
inline Formula class_relates(const Variable& x, const Variable& y) {
    return exists("p", land(atom(kSchemePredicate, {"p"}), kuratowski_pair(x, y, "p")));
}

// Replacement with P as the class parameter: if P is functional on the
// members of a, the image of a under P is a set.
inline Formula replacement_scheme() {
    Formula functional = forall(
        "x", implies(atom("In", {"x", "a"}),
                     forall("y", forall("z", implies(land(class_relates("x", "y"),
                                                          class_relates("x", "z")),
                                                     eq("y", "z"))))));
    Formula image = exists(
        "b", land(lnot(atom("A", {"b"})),
                  forall("y", iff(atom("In", {"y", "b"}),
                                  exists("x", land(atom("In", {"x", "a"}),
                                                   class_relates("x", "y")))))));
    return forall("a", implies(land(lnot(atom("A", {"a"})), functional), image));
}

inline Formula epsilon_induction_scheme() {
    Formula progressive = forall(
        "x", implies(forall("y", implies(atom("In", {"y", "x"}),
                                         atom(kSchemePredicate, {"y"}))),
                     atom(kSchemePredicate, {"x"})));
    return implies(progressive, forall("x", atom(kSchemePredicate, {"x"})));
}

// Von Neumann numeral: a transitive set of sets linearly ordered by
// membership whose nonempty subsets have both a least and a greatest member.
inline Formula nat_num(const Variable& n) {
    Formula transitive = forall(
        "u", implies(atom("In", {"u", n}),
                     land(lnot(atom("A", {"u"})),
                          forall("v", implies(atom("In", {"v", "u"}), atom("In", {"v", n}))))));
    Formula trichotomy = forall(
        "u", forall("v", implies(land(atom("In", {"u", n}), atom("In", {"v", n})),
                                 lor(atom("In", {"u", "v"}),
                                     lor(eq("u", "v"), atom("In", {"v", "u"}))))));
    Formula subset_of_n = forall("u", implies(atom("In", {"u", "t"}), atom("In", {"u", n})));
    Formula has_max = exists(
        "m", land(atom("In", {"m", "t"}),
                  forall("v", implies(atom("In", {"v", "t"}), lnot(atom("In", {"m", "v"}))))));
    Formula has_min = exists(
        "m", land(atom("In", {"m", "t"}),
                  forall("v", implies(atom("In", {"v", "t"}), lnot(atom("In", {"v", "m"}))))));
    Formula extremal = forall(
        "t", implies(land(land(lnot(atom("A", {"t"})), exists("u", atom("In", {"u", "t"}))),
                          subset_of_n),
                     land(has_max, has_min)));
    return land(land(land(lnot(atom("A", {n})), transitive), trichotomy), extremal);
}

// f maps n one-to-one onto x, with pairs coded a la Kuratowski.
inline Formula finite_bijection(const Variable& f, const Variable& n, const Variable& x) {
    auto fval = [&](const Variable& k, const Variable& y) {
        return exists("p", land(atom("In", {"p", f}), kuratowski_pair(k, y, "p")));
    };
    Formula pairs_only = forall(
        "p", implies(atom("In", {"p", f}),
                     exists("k", exists("y", land(land(atom("In", {"k", n}),
                                                       atom("In", {"y", x})),
                                                  kuratowski_pair("k", "y", "p"))))));
    Formula total = forall(
        "k", implies(atom("In", {"k", n}),
                     exists("y", land(atom("In", {"y", x}), fval("k", "y")))));
    Formula functional = forall(
        "k", forall("y", forall("z", implies(land(fval("k", "y"), fval("k", "z")),
                                             eq("y", "z")))));
    Formula injective = forall(
        "k", forall("l", forall("y", implies(land(land(atom("In", {"k", n}),
                                                       atom("In", {"l", n})),
                                                  land(fval("k", "y"), fval("l", "y"))),
                                             eq("k", "l")))));
    Formula onto = forall(
        "y", implies(atom("In", {"y", x}),
                     exists("k", land(atom("In", {"k", n}), fval("k", "y")))));
    return land(land(land(land(land(lnot(atom("A", {f})), pairs_only), total), functional),
                     injective),
                onto);
}

// Relativize every quantifier of ax to the predicate `guard`.
inline Formula relativize(const Formula& f, const std::string& guard) {
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Atom:
        case FormulaKind::Eq:
            return f;
        case FormulaKind::Not:
            return lnot(relativize(f.child(), guard));
        case FormulaKind::And:
            return land(relativize(f.left(), guard), relativize(f.right(), guard));
        case FormulaKind::Or:
            return lor(relativize(f.left(), guard), relativize(f.right(), guard));
        case FormulaKind::Implies:
            return implies(relativize(f.left(), guard), relativize(f.right(), guard));
        case FormulaKind::Iff:
            return iff(relativize(f.left(), guard), relativize(f.right(), guard));
        case FormulaKind::Forall:
            return forall(f.bound_var(), implies(atom(guard, {f.bound_var()}),
                                                 relativize(f.child(), guard)));
        case FormulaKind::Exists:
            return exists(f.bound_var(), land(atom(guard, {f.bound_var()}),
                                              relativize(f.child(), guard)));
    }
    return f;
}

} // namespace detail

// The scheme of hereditarily finite sets over atoms satisfying t, in the
// language of t extended with {In:2, A:1}. Conjunction of: replacement,
// epsilon-induction, atom-aware powerset and union, the finiteness axiom,
// extensionality for non-atoms, atom emptiness, and t relativized to A.
inline Scheme build_hf(const Theory& t) {
    Signature hf_sig(std::map<std::string, int>{{"In", 2}, {"A", 1}});
    if (!t.sig.disjoint_from(hf_sig))
        throw Error(ErrorKind::SignatureClash,
                    "theory signature clashes with the reserved symbols In, A");
    Signature sig = t.sig.merged(hf_sig);

    using namespace detail;
    std::vector<Formula> groups;
    groups.push_back(replacement_scheme());
    groups.push_back(epsilon_induction_scheme());
    groups.push_back(forall(
        "x", exists("y", forall("z", iff(atom("In", {"z", "y"}),
                                         land(lnot(atom("A", {"z"})),
                                              forall("w", implies(atom("In", {"w", "z"}),
                                                                  atom("In", {"w", "x"})))))))));
    groups.push_back(forall(
        "x", exists("y", land(lnot(atom("A", {"y"})),
                              forall("z", iff(atom("In", {"z", "y"}),
                                              exists("w", land(atom("In", {"w", "x"}),
                                                               atom("In", {"z", "w"})))))))));
    groups.push_back(forall(
        "x", implies(lnot(atom("A", {"x"})),
                     exists("n", exists("f", land(nat_num("n"),
                                                  finite_bijection("f", "n", "x")))))));
    groups.push_back(forall(
        "x", forall("y", implies(land(land(lnot(atom("A", {"x"})), lnot(atom("A", {"y"}))),
                                      forall("z", iff(atom("In", {"z", "x"}),
                                                      atom("In", {"z", "y"})))),
                                 eq("x", "y")))));
    groups.push_back(forall("x", implies(atom("A", {"x"}),
                                         forall("y", lnot(atom("In", {"y", "x"}))))));
    if (!t.axioms.empty()) {
        Formula rel = relativize(t.axioms[0], "A");
        for (std::size_t i = 1; i < t.axioms.size(); ++i)
            rel = land(std::move(rel), relativize(t.axioms[i], "A"));
        groups.push_back(std::move(rel));
    }

    Formula body = groups[0];
    for (std::size_t i = 1; i < groups.size(); ++i) body = land(std::move(body), groups[i]);
    return Scheme(sig, body);
}

// Flattens a left-associated conjunction chain; used for conjunct counting.
inline std::vector<Formula> top_conjuncts(const Formula& f) {
    std::vector<Formula> out;
    auto rec = [&](auto&& self, const Formula& g) -> void {
        if (g.kind() == FormulaKind::And) {
            self(self, g.left());
            out.push_back(g.right());
        } else {
            out.push_back(g);
        }
    };
    rec(rec, f);
    return out;
}

// ---------------------------------------------------------------------------
// Predicative comprehension generators.
//
// One-sorted rendering over s.sig u {Obj:1, Cls:1, In:2}. The scheme axiom
// "for all classes X, sigma[X/P]" becomes  all u.(Cls(u) -> sigma[In(.,u)/P]).
// Comprehension instances quantify the set parameter as class variable u and
// the comprehended class as y; phi ranges over s.sig-formulas with the set
// parameter occurring as membership in u, truncated at AST size max_depth.
// ---------------------------------------------------------------------------

namespace detail {

// Marker for the set parameter while enumerating comprehension bodies.
inline const std::string kSetParamMarker = "Xparam";

inline Formula rewrite_set_param(const Formula& f, const Variable& class_var) {
    switch (f.kind()) {
        case FormulaKind::Atom:
            if (f.symbol() == kSetParamMarker) return atom("In", {f.args()[0], class_var});
            return f;
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Eq:
            return f;
        case FormulaKind::Not:
            return lnot(rewrite_set_param(f.child(), class_var));
        case FormulaKind::And:
            return land(rewrite_set_param(f.left(), class_var),
                        rewrite_set_param(f.right(), class_var));
        case FormulaKind::Or:
            return lor(rewrite_set_param(f.left(), class_var),
                       rewrite_set_param(f.right(), class_var));
        case FormulaKind::Implies:
            return implies(rewrite_set_param(f.left(), class_var),
                           rewrite_set_param(f.right(), class_var));
        case FormulaKind::Iff:
            return iff(rewrite_set_param(f.left(), class_var),
                       rewrite_set_param(f.right(), class_var));
        case FormulaKind::Forall:
            return forall(f.bound_var(), rewrite_set_param(f.child(), class_var));
        case FormulaKind::Exists:
            return exists(f.bound_var(), rewrite_set_param(f.child(), class_var));
    }
    return f;
}

inline Theory build_comprehension(const Scheme& s, int max_depth, bool with_element_param) {
    if (max_depth < 1) throw Error(ErrorKind::InvalidDepth, "max_depth must be >= 1");
    Signature sorts(std::map<std::string, int>{{"Obj", 1}, {"Cls", 1}, {"In", 2}});
    Signature sig = s.sig.merged(sorts);

    std::vector<Formula> axioms;
    // all u.(Cls(u) -> sigma[In(.,u)/P])
    axioms.push_back(forall(
        "u", implies(atom("Cls", {"u"}),
                     substitute_predicate(s.body, atom("In", {"zp", "u"}), "zp"))));

    Signature enum_sig =
        s.sig.merged(Signature(std::map<std::string, int>{{kSetParamMarker, 1}}));
    std::vector<Variable> scope = {"z"};
    if (with_element_param) scope.push_back("w");
    std::set<std::string> seen;
    for (const auto& phi_raw : enumerate_formulas(enum_sig, max_depth, scope)) {
        Formula phi = rewrite_set_param(phi_raw, "u");
        Formula comprehension = exists(
            "y", land(atom("Cls", {"y"}),
                      forall("z", implies(atom("Obj", {"z"}),
                                          iff(atom("In", {"z", "y"}), phi)))));
        if (with_element_param)
            comprehension = forall("w", implies(atom("Obj", {"w"}), std::move(comprehension)));
        Formula ax = forall("u", implies(atom("Cls", {"u"}), std::move(comprehension)));
        if (seen.insert(alpha_key(ax)).second) axioms.push_back(std::move(ax));
    }
    return Theory(sig, axioms);
}

} // namespace detail

// Predicative comprehension with element parameters.
inline Theory build_pc(const Scheme& s, int max_depth) {
    return detail::build_comprehension(s, max_depth, /*with_element_param=*/true);
}

// Set-parameters-only predicative comprehension.
inline Theory build_spc(const Scheme& s, int max_depth) {
    return detail::build_comprehension(s, max_depth, /*with_element_param=*/false);
}

// ---------------------------------------------------------------------------
// Definiteness statements.
// ---------------------------------------------------------------------------

struct DefinitenessKind {
    enum class Tag { Iso, Eeq, InEveryCardinality, Height };

    Tag tag;
    std::optional<Formula> alpha;                   // Eeq
    std::shared_ptr<DefinitenessKind> inner;        // InEveryCardinality
    std::optional<Formula> ord_formula;             // Height

    static DefinitenessKind iso() { return {Tag::Iso, {}, nullptr, {}}; }

    static DefinitenessKind eeq(Formula alpha) {
        if (!is_closed(alpha))
            throw Error(ErrorKind::BadInput, "eeq sentence must be closed: " + print(alpha));
        return {Tag::Eeq, std::move(alpha), nullptr, {}};
    }

    static DefinitenessKind in_every_cardinality(DefinitenessKind inner) {
        return {Tag::InEveryCardinality, {}, std::make_shared<DefinitenessKind>(std::move(inner)), {}};
    }

    static DefinitenessKind height(Formula ord_formula) {
        if (free_vars(ord_formula).size() != 1)
            throw Error(ErrorKind::BadInput,
                        "height ordinal formula must have exactly one free variable");
        return {Tag::Height, {}, nullptr, std::move(ord_formula)};
    }

    std::string describe() const {
        switch (tag) {
            case Tag::Iso: return "exists F in classes: F : M1 -iso-> M2";
            case Tag::Eeq: return "M1 |= " + print(*alpha) + "  <->  M2 |= " + print(*alpha);
            case Tag::InEveryCardinality:
                return "(exists F in classes: F : M1 -bij-> M2) -> (" + inner->describe() + ")";
            case Tag::Height:
                return "(exists F in classes: F : Ord(M1) -iso-> Ord(M2)) -> iso(M1,M2)";
        }
        return {};
    }
};

// The check plan consumed by the second-order lab: quantify over pairs of
// strong-model tuples drawn from a class family, then test the guard/goal
// shape of the chosen kind. Not a first-order formula.
struct CheckPlan {
    Scheme tau;
    DefinitenessKind kind;

    bool has_guard() const {
        return kind.tag == DefinitenessKind::Tag::InEveryCardinality ||
               kind.tag == DefinitenessKind::Tag::Height;
    }

    // Goal that cannot distinguish any pair of models.
    bool trivially_satisfied() const {
        return kind.tag == DefinitenessKind::Tag::Eeq &&
               (kind.alpha->kind() == FormulaKind::True ||
                kind.alpha->kind() == FormulaKind::False);
    }

    std::string describe() const {
        return "for all strong-model tuples M1, M2 of the scheme: " + kind.describe();
    }
};

inline CheckPlan mk_definiteness_statement(const Scheme& tau, DefinitenessKind kind) {
    if (kind.tag == DefinitenessKind::Tag::Eeq)
        check_well_formed(*kind.alpha, tau.sig, /*allow_p=*/false);
    if (kind.tag == DefinitenessKind::Tag::Height)
        check_well_formed(*kind.ord_formula, tau.sig, /*allow_p=*/false);
    return CheckPlan{tau, std::move(kind)};
}

} // namespace wb
