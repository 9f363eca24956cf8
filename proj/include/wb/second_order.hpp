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
#include "wb/model.hpp"
#include "wb/scheme.hpp"
#include "wb/syntax.hpp"
#include "wb/translation.hpp"

// Explicit second-order structures (M, X): class families, sPC validation,
// strong-model-tuple enumeration, definiteness verdicts with witnesses and
// retract witness checking.

namespace wb {

// Per arity, an explicit list of tuple-sets over the ground universe, or the
// full powerset marker at each arity up to a bound.
class ClassFamily {
public:
    static ClassFamily full(int max_arity) {
        if (max_arity < 1) throw Error(ErrorKind::InvalidArity, "max arity must be >= 1");
        ClassFamily f;
        f.full_max_arity_ = max_arity;
        return f;
    }

    static ClassFamily explicit_family(std::map<int, std::vector<TupleSet>> classes) {
        ClassFamily f;
        for (const auto& [arity, members] : classes) {
            if (arity < 1) throw Error(ErrorKind::InvalidArity, "class arity must be >= 1");
            for (const auto& member : members)
                for (const auto& t : member)
                    if (static_cast<int>(t.size()) != arity)
                        throw Error(ErrorKind::ArityMismatch, "tuple arity mismatch in class family");
        }
        f.explicit_ = std::move(classes);
        return f;
    }

    bool is_full() const { return full_max_arity_.has_value(); }

    int max_arity() const {
        if (full_max_arity_) return *full_max_arity_;
        int m = 0;
        for (const auto& [arity, _] : explicit_) m = std::max(m, arity);
        return m;
    }

    void check_caps(int universe_size, const Caps& caps) const {
        if (!full_max_arity_) return;
        std::size_t bound = 1;
        for (int i = 0; i < 2 * *full_max_arity_; ++i) {
            bound *= static_cast<std::size_t>(universe_size);
            if (bound > caps.max_tuples)
                throw Error(ErrorKind::CapExceeded,
                            "full class family too large for this universe");
        }
    }

    // Members of the given arity whose tuples all lie in `allowed`, in
    // canonical (size, then lexicographic) order.
    std::vector<TupleSet> members_within(int arity, const std::vector<Tuple>& allowed,
                                         const Caps& caps) const {
        std::vector<TupleSet> out;
        if (full_max_arity_) {
            if (arity > *full_max_arity_) return out;
            if (allowed.size() >= 8 * sizeof(std::size_t) ||
                (std::size_t{1} << allowed.size()) > caps.max_class_members)
                throw Error(ErrorKind::CapExceeded, "class member enumeration too large");
            for (std::size_t mask = 0; mask < (std::size_t{1} << allowed.size()); ++mask) {
                TupleSet s;
                for (std::size_t k = 0; k < allowed.size(); ++k)
                    if (mask & (std::size_t{1} << k)) s.insert(allowed[k]);
                out.push_back(std::move(s));
            }
        } else {
            auto it = explicit_.find(arity);
            if (it == explicit_.end()) return out;
            std::set<Tuple> allow(allowed.begin(), allowed.end());
            for (const auto& member : it->second) {
                bool inside = std::all_of(member.begin(), member.end(),
                                          [&](const Tuple& t) { return allow.count(t) != 0; });
                if (inside) out.push_back(member);
            }
        }
        std::sort(out.begin(), out.end(), detail::tuple_set_less);
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    std::vector<TupleSet> members(int arity, int universe_size, const Caps& caps) const {
        return members_within(arity, detail::all_tuples(universe_size, arity), caps);
    }

    bool contains(int arity, const TupleSet& candidate, int universe_size) const {
        if (full_max_arity_) {
            if (arity > *full_max_arity_) return false;
            for (const auto& t : candidate)
                for (int e : t)
                    if (e < 0 || e >= universe_size) return false;
            return true;
        }
        auto it = explicit_.find(arity);
        if (it == explicit_.end()) return false;
        return std::find(it->second.begin(), it->second.end(), candidate) != it->second.end();
    }

    const std::map<int, std::vector<TupleSet>>& explicit_classes() const { return explicit_; }

private:
    std::optional<int> full_max_arity_;
    std::map<int, std::vector<TupleSet>> explicit_;
};

struct SOStructure {
    FiniteStructure ground;
    ClassFamily classes;
};

// A structure tuple assembled from a class family: domain, equality and one
// relation per scheme symbol, all restricted to the domain.
struct ModelTuple {
    std::set<int> dom;
    TupleSet eq;                          // subset of dom x dom; equivalence on dom
    std::map<std::string, TupleSet> rels; // per scheme symbol, subset of dom^arity

    bool operator==(const ModelTuple& other) const {
        return dom == other.dom && eq == other.eq && rels == other.rels;
    }
};

struct Verdict {
    bool holds;
    bool vacuous = false;  // no strong-model tuples existed
    std::optional<TupleSet> witness;
    std::optional<std::pair<ModelTuple, ModelTuple>> counterexample;
    std::string failed_tag;  // which guard/goal failed, when !holds
};

// The parameter-free definable family: invariant relations at every arity
// up to max_arity.
inline ClassFamily mk_defpf_family(const FiniteStructure& m, int max_arity,
                                   const Caps& caps = {}) {
    if (max_arity < 1) throw Error(ErrorKind::InvalidArity, "max arity must be >= 1");
    std::map<int, std::vector<TupleSet>> classes;
    for (int a = 1; a <= max_arity; ++a) classes[a] = invariant_relations(m, a, caps);
    return ClassFamily::explicit_family(std::move(classes));
}

// ---------------------------------------------------------------------------
// sPC validation.
// ---------------------------------------------------------------------------

struct SpcFailure {
    std::string kind;          // "axiom" or "closure"
    std::set<int> x;           // the class X under test
    std::optional<std::set<int>> witness;  // missing invariant subset (closure)
};

struct SpcReport {
    std::vector<SpcFailure> failures;
    bool ok() const { return failures.empty(); }
};

namespace detail {

inline std::set<int> unary_class_of(const TupleSet& s) {
    std::set<int> out;
    for (const auto& t : s) out.insert(t[0]);
    return out;
}

inline TupleSet unary_tuples(const std::set<int>& s) {
    TupleSet out;
    for (int e : s) out.insert({e});
    return out;
}

} // namespace detail

// Verifies (a) every unary class X satisfies the scheme body with P := X,
// and (b) closure of the family under definability from a single set
// parameter, operationalized as Aut(ground, X)-invariance.
inline SpcReport check_spc(const SOStructure& so, const Scheme& s, const Caps& caps = {}) {
    if (!(s.sig == so.ground.sig()))
        throw Error(ErrorKind::SignatureMismatch, "scheme signature differs from ground signature");
    so.classes.check_caps(so.ground.size(), caps);
    SpcReport report;
    auto unary = so.classes.members(1, so.ground.size(), caps);
    std::set<std::set<int>> family;
    for (const auto& member : unary) family.insert(detail::unary_class_of(member));

    auto ground_auts = automorphisms(so.ground);
    for (const auto& member : unary) {
        std::set<int> x = detail::unary_class_of(member);
        EvalOptions opts;
        opts.p_extension = &x;
        if (!eval(so.ground, s.body, {}, opts))
            report.failures.push_back(SpcFailure{"axiom", x, std::nullopt});

        // automorphisms of the expansion (ground, X)
        std::vector<std::vector<int>> fixing;
        for (const auto& g : ground_auts) {
            bool preserves = true;
            for (int e = 0; e < so.ground.size(); ++e)
                if (x.count(e) != x.count(g[static_cast<std::size_t>(e)])) {
                    preserves = false;
                    break;
                }
            if (preserves) fixing.push_back(g);
        }
        // orbits of elements under Aut(ground, X)
        std::vector<std::set<int>> orbits;
        std::set<int> seen;
        for (int e = 0; e < so.ground.size(); ++e) {
            if (seen.count(e)) continue;
            std::set<int> orbit = {e};
            std::vector<int> frontier = {e};
            while (!frontier.empty()) {
                int cur = frontier.back();
                frontier.pop_back();
                for (const auto& g : fixing) {
                    int img = g[static_cast<std::size_t>(cur)];
                    if (orbit.insert(img).second) frontier.push_back(img);
                }
            }
            seen.insert(orbit.begin(), orbit.end());
            orbits.push_back(std::move(orbit));
        }
        // every union of orbits must be in the family
        for (std::size_t mask = 0; mask < (std::size_t{1} << orbits.size()); ++mask) {
            std::set<int> u;
            for (std::size_t k = 0; k < orbits.size(); ++k)
                if (mask & (std::size_t{1} << k)) u.insert(orbits[k].begin(), orbits[k].end());
            if (!family.count(u)) {
                report.failures.push_back(SpcFailure{"closure", x, u});
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Strong-model-tuple enumeration.
// ---------------------------------------------------------------------------

namespace detail {

inline FiniteStructure materialize_tuple(const FiniteStructure& ground, const Signature& sig,
                                         const ModelTuple& t) {
    return FiniteStructure(sig, ground.universe(), t.rels);
}

inline bool eq_is_equivalence_on(const TupleSet& eq, const std::set<int>& dom) {
    auto rel = [&](int a, int b) { return eq.count({a, b}) != 0; };
    for (const auto& t : eq)
        if (!dom.count(t[0]) || !dom.count(t[1])) return false;
    for (int a : dom) {
        if (!rel(a, a)) return false;
        for (int b : dom) {
            if (rel(a, b) && !rel(b, a)) return false;
            for (int c : dom)
                if (rel(a, b) && rel(b, c) && !rel(a, c)) return false;
        }
    }
    return true;
}

inline bool eq_is_congruence(const TupleSet& eq, const std::set<int>& dom,
                             const std::map<std::string, TupleSet>& rels,
                             const Signature& sig) {
    auto rel = [&](int a, int b) { return eq.count({a, b}) != 0; };
    for (const auto& [name, tuples] : rels) {
        const TupleSet& rel_set = tuples;
        int arity = sig.arity(name);
        for (const auto& t : rel_set) {
            Tuple probe(t.size());
            auto walk = [&](auto&& self, int pos) -> bool {
                if (pos == arity) return rel_set.count(probe) != 0;
                for (int e : dom) {
                    if (!rel(t[static_cast<std::size_t>(pos)], e)) continue;
                    probe[static_cast<std::size_t>(pos)] = e;
                    if (!self(self, pos + 1)) return false;
                }
                return true;
            };
            if (!walk(walk, 0)) return false;
        }
    }
    return true;
}

inline bool subset_eq_invariant(const std::set<int>& y, const TupleSet& eq,
                                const std::set<int>& dom) {
    for (int a : y)
        for (int b : dom)
            if (eq.count({a, b}) && !y.count(b)) return false;
    return true;
}

} // namespace detail

// True iff every eq-invariant unary member Y of the family that lies inside
// the tuple's domain satisfies the scheme body (P := Y), evaluated under
// eta-semantics relativized to the domain.
inline bool is_strong_tuple(const SOStructure& so, const Scheme& tau, const ModelTuple& t,
                            const Caps& caps = {}) {
    FiniteStructure st = detail::materialize_tuple(so.ground, tau.sig, t);
    std::vector<Tuple> dom_tuples;
    for (int e : t.dom) dom_tuples.push_back({e});
    for (const auto& member : so.classes.members_within(1, dom_tuples, caps)) {
        std::set<int> y = detail::unary_class_of(member);
        if (!detail::subset_eq_invariant(y, t.eq, t.dom)) continue;
        EvalOptions opts;
        opts.p_extension = &y;
        opts.eq_relation = &t.eq;
        opts.domain = &t.dom;
        if (!eval(st, tau.body, {}, opts)) return false;
    }
    return true;
}

// Every ModelTuple assembled from the class family that passes: nonempty
// domain, equality an equivalence and congruence on the domain, and the
// strong-model test over all admissible Y. Canonical enumeration order.
inline std::vector<ModelTuple> x_strong_models(const SOStructure& so, const Scheme& tau,
                                               const Caps& caps = {}) {
    so.classes.check_caps(so.ground.size(), caps);
    for (const auto& [name, arity] : tau.sig.relations())
        if (arity > so.classes.max_arity())
            throw Error(ErrorKind::InvalidArity,
                        "scheme relation '" + name + "' has arity above the class family's bound");

    std::vector<ModelTuple> out;
    auto doms = so.classes.members(1, so.ground.size(), caps);
    for (const auto& dom_member : doms) {
        std::set<int> dom = detail::unary_class_of(dom_member);
        if (dom.empty()) continue;

        std::vector<Tuple> dom_pairs;
        for (int a : dom)
            for (int b : dom) dom_pairs.push_back({a, b});
        std::vector<TupleSet> eq_candidates;
        for (const auto& eq : so.classes.members_within(2, dom_pairs, caps))
            if (detail::eq_is_equivalence_on(eq, dom)) eq_candidates.push_back(eq);

        // per-symbol relation candidates within dom^arity
        std::vector<std::string> symbols;
        for (const auto& [name, _] : tau.sig.relations()) symbols.push_back(name);
        std::vector<std::vector<TupleSet>> rel_candidates;
        for (const auto& name : symbols) {
            int arity = tau.sig.arity(name);
            std::vector<int> dom_list(dom.begin(), dom.end());
            std::vector<Tuple> allowed;
            Tuple t(static_cast<std::size_t>(arity), 0);
            auto gen = [&](auto&& self, int pos) -> void {
                if (pos == arity) {
                    allowed.push_back(t);
                    return;
                }
                for (int e : dom_list) {
                    t[static_cast<std::size_t>(pos)] = e;
                    self(self, pos + 1);
                }
            };
            gen(gen, 0);
            rel_candidates.push_back(so.classes.members_within(arity, allowed, caps));
        }

        for (const auto& eq : eq_candidates) {
            ModelTuple candidate;
            candidate.dom = dom;
            candidate.eq = eq;
            auto assign = [&](auto&& self, std::size_t sym) -> void {
                if (sym == symbols.size()) {
                    if (!detail::eq_is_congruence(candidate.eq, candidate.dom, candidate.rels,
                                                  tau.sig))
                        return;
                    if (is_strong_tuple(so, tau, candidate, caps)) out.push_back(candidate);
                    return;
                }
                for (const auto& rel : rel_candidates[sym]) {
                    candidate.rels[symbols[sym]] = rel;
                    self(self, sym + 1);
                }
            };
            assign(assign, 0);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Witness search between tuples, modulo their equality relations.
// ---------------------------------------------------------------------------

namespace detail {

// Quotient view of a tuple: universe = class representatives of dom.
struct QuotientView {
    std::vector<int> reps;              // ground indices, ordered
    std::map<int, int> rep_of;          // ground element -> position in reps
    FiniteStructure structure;
};

inline QuotientView quotient_view(const FiniteStructure& ground, const Signature& sig,
                                  const ModelTuple& t) {
    std::map<int, int> cls;  // ground element -> rep ground element
    std::vector<int> reps;
    for (int e : t.dom) {
        int rep = -1;
        for (int r : t.dom) {
            if (t.eq.count({e, r})) { rep = std::min(rep == -1 ? r : rep, r); }
        }
        cls[e] = rep;
    }
    for (int e : t.dom)
        if (cls[e] == e) reps.push_back(e);
    std::map<int, int> position;
    for (std::size_t i = 0; i < reps.size(); ++i) position[reps[i]] = static_cast<int>(i);

    std::vector<std::string> universe;
    for (int r : reps) universe.push_back(ground.element(r));
    std::map<std::string, TupleSet> interp;
    for (const auto& [name, tuples] : t.rels) {
        TupleSet mapped;
        for (const auto& tup : tuples) {
            Tuple q;
            for (int e : tup) q.push_back(position[cls[e]]);
            mapped.insert(std::move(q));
        }
        interp.emplace(name, std::move(mapped));
    }
    for (const auto& [name, _] : sig.relations()) interp.try_emplace(name);
    return QuotientView{std::move(reps), std::move(position),
                        FiniteStructure(sig, std::move(universe), std::move(interp))};
}

// Does the relation F (on ground elements) define an isomorphism between the
// two quotient views? `require_iso` false checks only bijectivity.
inline bool relation_defines_map(const QuotientView& a, const QuotientView& b,
                                 const ModelTuple& ta, const ModelTuple& tb, const TupleSet& f,
                                 bool require_iso) {
    // induced relation on quotient positions
    std::set<std::pair<int, int>> rel;
    for (const auto& pair : f) {
        int x = pair[0], y = pair[1];
        if (!ta.dom.count(x) || !tb.dom.count(y)) continue;  // junk outside the domains
        int xr = -1, yr = -1;
        for (int r : a.reps)
            if (ta.eq.count({x, r})) { xr = a.rep_of.at(r); break; }
        for (int r : b.reps)
            if (tb.eq.count({y, r})) { yr = b.rep_of.at(r); break; }
        if (xr >= 0 && yr >= 0) rel.emplace(xr, yr);
    }
    int na = a.structure.size(), nb = b.structure.size();
    std::vector<int> image(static_cast<std::size_t>(na), -1);
    for (const auto& [x, y] : rel) {
        if (image[static_cast<std::size_t>(x)] != -1 && image[static_cast<std::size_t>(x)] != y)
            return false;  // not functional
        image[static_cast<std::size_t>(x)] = y;
    }
    std::vector<bool> hit(static_cast<std::size_t>(nb), false);
    for (int x = 0; x < na; ++x) {
        if (image[static_cast<std::size_t>(x)] == -1) return false;  // not total
        if (hit[static_cast<std::size_t>(image[static_cast<std::size_t>(x)])])
            return false;  // not injective
        hit[static_cast<std::size_t>(image[static_cast<std::size_t>(x)])] = true;
    }
    for (int y = 0; y < nb; ++y)
        if (!hit[static_cast<std::size_t>(y)]) return false;  // not surjective
    if (!require_iso) return true;
    for (const auto& [name, arity] : a.structure.sig().relations()) {
        for (const auto& tup : detail::all_tuples(na, arity)) {
            Tuple mapped;
            for (int e : tup) mapped.push_back(image[static_cast<std::size_t>(e)]);
            if (a.structure.holds(name, tup) != b.structure.holds(name, mapped)) return false;
        }
    }
    return true;
}

// Pullback of a quotient-position map to a ground relation.
inline TupleSet pullback_relation(const QuotientView& a, const QuotientView& b,
                                  const ModelTuple& ta, const ModelTuple& tb,
                                  const std::vector<int>& image) {
    TupleSet out;
    for (int x : ta.dom)
        for (int y : tb.dom) {
            int xr = -1, yr = -1;
            for (int r : a.reps)
                if (ta.eq.count({x, r})) { xr = a.rep_of.at(r); break; }
            for (int r : b.reps)
                if (tb.eq.count({y, r})) { yr = b.rep_of.at(r); break; }
            if (xr >= 0 && yr >= 0 && image[static_cast<std::size_t>(xr)] == yr)
                out.insert({x, y});
        }
    return out;
}

} // namespace detail

// Searches the class family (arity 2) for a relation defining an isomorphism
// between the two tuples, modulo their equality relations. With a full
// family the membership condition is vacuous, so plain isomorphism search
// decides and the pullback of the found map is returned as witness.
inline std::optional<TupleSet> find_class_iso(const SOStructure& so, const Signature& sig,
                                              const ModelTuple& a, const ModelTuple& b,
                                              const Caps& caps = {}) {
    auto qa = detail::quotient_view(so.ground, sig, a);
    auto qb = detail::quotient_view(so.ground, sig, b);
    if (so.classes.is_full()) {
        if (so.classes.max_arity() < 2) return std::nullopt;
        auto iso = find_isomorphism(qa.structure, qb.structure);
        if (!iso) return std::nullopt;
        return detail::pullback_relation(qa, qb, a, b, *iso);
    }
    // pairs outside dom1 x dom2 are ignored, so scan every member once
    for (const auto& f : so.classes.members(2, so.ground.size(), caps))
        if (detail::relation_defines_map(qa, qb, a, b, f, /*require_iso=*/true)) return f;
    return std::nullopt;
}

// Same, for a bare bijection between the quotient domains.
inline std::optional<TupleSet> find_class_bijection(const SOStructure& so, const Signature& sig,
                                                    const ModelTuple& a, const ModelTuple& b,
                                                    const Caps& caps = {}) {
    auto qa = detail::quotient_view(so.ground, sig, a);
    auto qb = detail::quotient_view(so.ground, sig, b);
    if (so.classes.is_full()) {
        if (so.classes.max_arity() < 2) return std::nullopt;
        if (qa.structure.size() != qb.structure.size()) return std::nullopt;
        std::vector<int> image;
        for (int i = 0; i < qa.structure.size(); ++i) image.push_back(i);
        return detail::pullback_relation(qa, qb, a, b, image);
    }
    for (const auto& f : so.classes.members(2, so.ground.size(), caps))
        if (detail::relation_defines_map(qa, qb, a, b, f, /*require_iso=*/false)) return f;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Definiteness verdicts.
// ---------------------------------------------------------------------------

namespace detail {

struct PhiOutcome {
    bool value;
    std::string failed_tag;  // set when value is false
};

inline bool tuple_satisfies(const SOStructure& so, const Signature& sig, const ModelTuple& t,
                            const Formula& sentence) {
    FiniteStructure st = materialize_tuple(so.ground, sig, t);
    EvalOptions opts;
    opts.eq_relation = &t.eq;
    opts.domain = &t.dom;
    return eval(st, sentence, {}, opts);
}

// Elements of the domain satisfying the one-free-variable formula.
inline std::set<int> carve_subset(const SOStructure& so, const Signature& sig,
                                  const ModelTuple& t, const Formula& f) {
    FiniteStructure st = materialize_tuple(so.ground, sig, t);
    EvalOptions opts;
    opts.eq_relation = &t.eq;
    opts.domain = &t.dom;
    auto fv = free_vars(f);
    std::set<int> out;
    for (int e : t.dom)
        if (eval(st, f, {{fv[0], e}}, opts)) out.insert(e);
    return out;
}

// The sub-tuple induced on a subset of the domain.
inline ModelTuple restrict_tuple(const ModelTuple& t, const std::set<int>& sub) {
    ModelTuple out;
    out.dom = sub;
    for (const auto& p : t.eq)
        if (sub.count(p[0]) && sub.count(p[1])) out.eq.insert(p);
    for (const auto& [name, tuples] : t.rels) {
        TupleSet kept;
        for (const auto& tup : tuples) {
            bool inside = std::all_of(tup.begin(), tup.end(),
                                      [&](int e) { return sub.count(e) != 0; });
            if (inside) kept.insert(tup);
        }
        out.rels.emplace(name, std::move(kept));
    }
    return out;
}

// The height guard presumes the carved class is linearly ordered by some
// binary relation of the scheme, modulo equality.
inline void check_height_well_formed(const Signature& sig, const ModelTuple& t,
                                     const std::set<int>& ord) {
    if (ord.empty()) return;
    for (const auto& [name, arity] : sig.relations()) {
        if (arity != 2) continue;
        const TupleSet& rel = t.rels.count(name) ? t.rels.at(name) : TupleSet{};
        auto lt = [&](int a, int b) { return rel.count({a, b}) != 0; };
        auto eqv = [&](int a, int b) { return t.eq.count({a, b}) != 0; };
        bool linear = true;
        for (int a : ord)
            for (int b : ord) {
                bool any = lt(a, b) || lt(b, a) || eqv(a, b);
                bool strict_both = lt(a, b) && lt(b, a);
                if (!any || (strict_both && !eqv(a, b))) { linear = false; break; }
            }
        for (int a : ord) {
            if (!linear) break;
            for (int b : ord)
                for (int c : ord)
                    if (lt(a, b) && lt(b, c) && !lt(a, c) && !eqv(a, c)) { linear = false; break; }
        }
        if (linear) return;
    }
    throw Error(ErrorKind::HeightIllFormed,
                "no binary relation linearly orders the carved ordinal part");
}

inline PhiOutcome evaluate_phi(const SOStructure& so, const Scheme& tau,
                               const DefinitenessKind& kind, const ModelTuple& a,
                               const ModelTuple& b, const Caps& caps) {
    switch (kind.tag) {
        case DefinitenessKind::Tag::Iso: {
            if (find_class_iso(so, tau.sig, a, b, caps)) return {true, {}};
            return {false, "iso"};
        }
        case DefinitenessKind::Tag::Eeq: {
            bool va = tuple_satisfies(so, tau.sig, a, *kind.alpha);
            bool vb = tuple_satisfies(so, tau.sig, b, *kind.alpha);
            if (va == vb) return {true, {}};
            return {false, "eeq"};
        }
        case DefinitenessKind::Tag::InEveryCardinality: {
            if (!find_class_bijection(so, tau.sig, a, b, caps)) return {true, {}};
            auto inner = evaluate_phi(so, tau, *kind.inner, a, b, caps);
            if (inner.value) return {true, {}};
            return {false, "iec:" + inner.failed_tag};
        }
        case DefinitenessKind::Tag::Height: {
            std::set<int> ord_a = carve_subset(so, tau.sig, a, *kind.ord_formula);
            std::set<int> ord_b = carve_subset(so, tau.sig, b, *kind.ord_formula);
            check_height_well_formed(tau.sig, a, ord_a);
            check_height_well_formed(tau.sig, b, ord_b);
            ModelTuple ra = restrict_tuple(a, ord_a);
            ModelTuple rb = restrict_tuple(b, ord_b);
            bool guard = ord_a.empty() && ord_b.empty()
                             ? true
                             : find_class_iso(so, tau.sig, ra, rb, caps).has_value();
            if (!guard) return {true, {}};
            if (find_class_iso(so, tau.sig, a, b, caps)) return {true, {}};
            return {false, "height:iso"};
        }
    }
    return {false, "unknown"};
}

} // namespace detail

// The Phi-definiteness statement checked over all ordered pairs of strong-
// model tuples; the verdict carries the first failing pair in canonical
// order, or reports explicit vacuity when no tuple exists.
inline Verdict check_definite(const SOStructure& so, const Scheme& tau,
                              const DefinitenessKind& kind, const Caps& caps = {}) {
    auto tuples = x_strong_models(so, tau, caps);
    if (tuples.empty()) return Verdict{true, /*vacuous=*/true, std::nullopt, std::nullopt, {}};
    for (const auto& a : tuples)
        for (const auto& b : tuples) {
            auto outcome = detail::evaluate_phi(so, tau, kind, a, b, caps);
            if (!outcome.value)
                return Verdict{false, false, std::nullopt, std::make_pair(a, b),
                               outcome.failed_tag};
        }
    return Verdict{true, false, std::nullopt, std::nullopt, {}};
}

// The statement produced by mk_definiteness_statement, executed against a
// concrete second-order structure.
inline Verdict check_definite(const SOStructure& so, const CheckPlan& plan,
                              const Caps& caps = {}) {
    return check_definite(so, plan.tau, plan.kind, caps);
}

// ---------------------------------------------------------------------------
// Retract witnesses.
// ---------------------------------------------------------------------------

// Checks that f_witness defines an isomorphism between the ground structure
// and the internal model of the composite translation (the five conditions
// with t1 = identity, t2 = compose(t, s_tr)), and that the defined relation
// is a member of the class family at its arity.
inline Verdict check_retract(const SOStructure& so, const Translation& t,
                             const Translation& s_tr, const Formula& f_witness,
                             const Caps& caps = {}) {
    Translation composite = compose(t, s_tr);
    Translation ident = identity_translation(composite.source_sig());
    auto conditions = iso_conditions(ident, composite, f_witness);
    static const char* tags[] = {"domain containment", "totality", "surjectivity",
                                 "equality compatibility", "relation preservation"};
    for (std::size_t i = 0; i < conditions.size(); ++i) {
        if (!eval(so.ground, conditions[i]))
            return Verdict{false, false, std::nullopt, std::nullopt,
                           std::string("condition ") + std::to_string(i + 1) + " (" + tags[i] +
                               ") fails"};
    }

    // extension of the witness as a relation on the ground structure
    const int mn = composite.dim();
    std::size_t space = 1;
    for (int i = 0; i < 1 + mn; ++i) {
        space *= static_cast<std::size_t>(so.ground.size());
        if (space > caps.max_tuples)
            throw Error(ErrorKind::CapExceeded, "witness extension space exceeds the tuple cap");
    }
    auto fv_left = std::vector<Variable>{detail::iota_left_var(0)};
    std::vector<Variable> fv_right;
    for (int i = 0; i < mn; ++i) fv_right.push_back(detail::iota_right_var(i));
    TupleSet extension;
    for (int x = 0; x < so.ground.size(); ++x) {
        for (const auto& tup : detail::all_tuples(so.ground.size(), mn)) {
            Assignment a;
            a[fv_left[0]] = x;
            for (int i = 0; i < mn; ++i) a[fv_right[static_cast<std::size_t>(i)]] = tup[static_cast<std::size_t>(i)];
            if (eval(so.ground, f_witness, a)) {
                Tuple row = {x};
                row.insert(row.end(), tup.begin(), tup.end());
                extension.insert(row);
            }
        }
    }
    if (!so.classes.contains(1 + mn, extension, so.ground.size()))
        return Verdict{false, false, extension, std::nullopt,
                       "witness relation not a member of the class family at arity " +
                           std::to_string(1 + mn)};
    return Verdict{true, false, extension, std::nullopt, {}};
}

// ---------------------------------------------------------------------------
// Isomorphism-invariance of a statement Phi.
// ---------------------------------------------------------------------------

struct InvarianceViolation {
    std::size_t a, b;    // pair indices into the tuple list
    std::size_t a2, b2;  // isomorphic replacements
};

struct InvarianceReport {
    std::vector<ModelTuple> tuples;
    std::vector<InvarianceViolation> violations;
    bool ok() const { return violations.empty(); }
};

// Confirms that the goal value is stable under replacing either side of a
// pair by an isomorphic tuple (isomorphism witnessed inside the family).
inline InvarianceReport check_iso_statement_invariance(
    const SOStructure& so, const Scheme& tau,
    const std::function<bool(const ModelTuple&, const ModelTuple&)>& phi,
    const Caps& caps = {}) {
    InvarianceReport report;
    report.tuples = x_strong_models(so, tau, caps);
    const auto& tuples = report.tuples;
    std::size_t n = tuples.size();

    std::vector<std::vector<bool>> isomorphic(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            isomorphic[i][j] = find_class_iso(so, tau.sig, tuples[i], tuples[j], caps).has_value();

    std::vector<std::vector<bool>> value(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) value[i][j] = phi(tuples[i], tuples[j]);

    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t a2 = 0; a2 < n; ++a2) {
                if (!isomorphic[a][a2]) continue;
                for (std::size_t b2 = 0; b2 < n; ++b2) {
                    if (!isomorphic[b][b2]) continue;
                    if (value[a][b] != value[a2][b2])
                        report.violations.push_back(InvarianceViolation{a, b, a2, b2});
                }
            }
    return report;
}

inline InvarianceReport check_iso_statement_invariance(const SOStructure& so, const Scheme& tau,
                                                       const DefinitenessKind& kind,
                                                       const Caps& caps = {}) {
    return check_iso_statement_invariance(
        so, tau,
        [&](const ModelTuple& a, const ModelTuple& b) {
            return detail::evaluate_phi(so, tau, kind, a, b, caps).value;
        },
        caps);
}

} // namespace wb
