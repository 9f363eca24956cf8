#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wb/error.hpp"
#include "wb/syntax.hpp"

// Translations between relational signatures, treated as compiler passes:
// application to formulas, composition, syntactic property flags, and the
// isomorphism-of-interpretations conditions.
//
// Fixed variable conventions (also used by the JSON translation files):
//   delta:   x1 .. xn
//   eta:     x1_1 .. x1_n, x2_1 .. x2_n
//   phi_R:   v1_1 .. v1_n, ..., vk_1 .. vk_n     (k = arity of R)
//   iota:    x1 .. xn (left interpretation), x1s .. xms (right)
// Translated source variables become tuples "v<name>_<coordinate>".

namespace wb {

namespace detail {

inline Variable delta_var(int i) { return "x" + std::to_string(i + 1); }

inline Variable eta_var(int side, int i) {
    return "x" + std::to_string(side + 1) + "_" + std::to_string(i + 1);
}

inline Variable rel_var(int slot, int i) {
    return "v" + std::to_string(slot + 1) + "_" + std::to_string(i + 1);
}

inline Variable iota_left_var(int i) { return "x" + std::to_string(i + 1); }
inline Variable iota_right_var(int i) { return "x" + std::to_string(i + 1) + "s"; }

inline Variable tuple_var(const Variable& source, int i) {
    return "v" + source + "_" + std::to_string(i + 1);
}

} // namespace detail

class Translation {
public:
    Translation(Signature source_sig, Signature target_sig, int dim, Formula delta, Formula eta,
                std::map<std::string, Formula> rel_map)
        : source_sig_(std::move(source_sig)),
          target_sig_(std::move(target_sig)),
          dim_(dim),
          delta_(std::move(delta)),
          eta_(std::move(eta)),
          rel_map_(std::move(rel_map)) {
        if (dim_ < 1) throw Error(ErrorKind::BadInput, "translation dimension must be >= 1");
        check_component(delta_, expected_delta_vars(), "delta");
        check_component(eta_, expected_eta_vars(), "eta");
        for (const auto& [name, arity] : source_sig_.relations()) {
            auto it = rel_map_.find(name);
            if (it == rel_map_.end())
                throw Error(ErrorKind::BadInput, "translation missing formula for relation '" + name + "'");
            check_component(it->second, expected_rel_vars(arity), "phi_" + name);
        }
        for (const auto& [name, _] : rel_map_)
            if (!source_sig_.has(name))
                throw Error(ErrorKind::BadInput,
                            "translation maps unknown relation '" + name + "'");
    }

    const Signature& source_sig() const { return source_sig_; }
    const Signature& target_sig() const { return target_sig_; }
    int dim() const { return dim_; }
    const Formula& delta() const { return delta_; }
    const Formula& eta() const { return eta_; }
    const std::map<std::string, Formula>& rel_map() const { return rel_map_; }

    const Formula& rel_formula(const std::string& name) const {
        auto it = rel_map_.find(name);
        if (it == rel_map_.end())
            throw Error(ErrorKind::UnknownSymbol, "no formula for relation '" + name + "'");
        return it->second;
    }

    std::vector<Variable> expected_delta_vars() const {
        std::vector<Variable> out;
        for (int i = 0; i < dim_; ++i) out.push_back(detail::delta_var(i));
        return out;
    }

    std::vector<Variable> expected_eta_vars() const {
        std::vector<Variable> out;
        for (int side = 0; side < 2; ++side)
            for (int i = 0; i < dim_; ++i) out.push_back(detail::eta_var(side, i));
        return out;
    }

    std::vector<Variable> expected_rel_vars(int arity) const {
        std::vector<Variable> out;
        for (int slot = 0; slot < arity; ++slot)
            for (int i = 0; i < dim_; ++i) out.push_back(detail::rel_var(slot, i));
        return out;
    }

    // delta instantiated at a named tuple.
    Formula delta_at(const std::vector<Variable>& tuple) const {
        return instantiate(delta_, expected_delta_vars(), tuple);
    }

    Formula eta_at(const std::vector<Variable>& lhs, const std::vector<Variable>& rhs) const {
        std::vector<Variable> all = lhs;
        all.insert(all.end(), rhs.begin(), rhs.end());
        return instantiate(eta_, expected_eta_vars(), all);
    }

    Formula rel_at(const std::string& name, const std::vector<std::vector<Variable>>& tuples) const {
        std::vector<Variable> all;
        for (const auto& t : tuples) all.insert(all.end(), t.begin(), t.end());
        return instantiate(rel_formula(name), expected_rel_vars(source_sig_.arity(name)), all);
    }

private:
    void check_component(const Formula& f, const std::vector<Variable>& expected,
                         const std::string& what) const {
        check_well_formed(f, target_sig_, /*allow_p=*/false);
        auto fv = free_vars(f);
        for (const auto& v : fv)
            if (std::find(expected.begin(), expected.end(), v) == expected.end())
                throw Error(ErrorKind::BadInput,
                            what + " has unexpected free variable '" + v + "'");
    }

    static Formula instantiate(const Formula& f, const std::vector<Variable>& from,
                               const std::vector<Variable>& to) {
        if (from.size() != to.size())
            throw Error(ErrorKind::ArityMismatch, "tuple length mismatch in instantiation");
        std::map<Variable, Variable> subst;
        for (std::size_t i = 0; i < from.size(); ++i) subst[from[i]] = to[i];
        return rename_free(f, subst);
    }

    Signature source_sig_;
    Signature target_sig_;
    int dim_;
    Formula delta_;
    Formula eta_;
    std::map<std::string, Formula> rel_map_;
};

struct TranslationFlags {
    int dimension;
    bool unrelativized;
    bool identity_preserving;
    bool direct;
};

// The identity translation over a signature.
inline Translation identity_translation(const Signature& sig) {
    Formula delta = eq("x1", "x1");
    Formula eta = eq("x1_1", "x2_1");
    std::map<std::string, Formula> rels;
    for (const auto& [name, arity] : sig.relations()) {
        std::vector<Variable> args;
        for (int slot = 0; slot < arity; ++slot) args.push_back(detail::rel_var(slot, 0));
        rels.emplace(name, atom(name, std::move(args)));
    }
    return Translation(sig, sig, 1, std::move(delta), std::move(eta), std::move(rels));
}

// ---------------------------------------------------------------------------
// apply: the recursive translation pass of a formula.
// ---------------------------------------------------------------------------

namespace detail {

inline Formula unrelativized_pattern(int dim);

} // namespace detail

// Structural recursion over f: equalities map to eta, atoms to their phi_R,
// Boolean connectives go through homomorphically, existentials relativize
// by delta, and universals are first rewritten as not-exists-not. When delta
// is literally the unrelativized pattern the vacuous guard is dropped, so
// the identity translation is the alpha-identity on the exists-fragment.
inline Formula apply(const Translation& t, const Formula& f) {
    if (mentions_symbol(f, kSchemePredicate))
        throw Error(ErrorKind::SignatureMismatch, "cannot translate a formula containing 'P'");
    check_well_formed(f, t.source_sig(), /*allow_p=*/false);

    const bool guard_needed = !alpha_equal(t.delta(), detail::unrelativized_pattern(t.dim()));

    auto tuple_of = [&](const Variable& v) {
        std::vector<Variable> out;
        for (int i = 0; i < t.dim(); ++i) out.push_back(detail::tuple_var(v, i));
        return out;
    };

    auto rec = [&](auto&& self, const Formula& g) -> Formula {
        switch (g.kind()) {
            case FormulaKind::True:
            case FormulaKind::False:
                return g;
            case FormulaKind::Eq:
                return t.eta_at(tuple_of(g.eq_left()), tuple_of(g.eq_right()));
            case FormulaKind::Atom: {
                std::vector<std::vector<Variable>> tuples;
                for (const auto& v : g.args()) tuples.push_back(tuple_of(v));
                return t.rel_at(g.symbol(), tuples);
            }
            case FormulaKind::Not:
                return lnot(self(self, g.child()));
            case FormulaKind::And:
                return land(self(self, g.left()), self(self, g.right()));
            case FormulaKind::Or:
                return lor(self(self, g.left()), self(self, g.right()));
            case FormulaKind::Implies:
                return implies(self(self, g.left()), self(self, g.right()));
            case FormulaKind::Iff:
                return iff(self(self, g.left()), self(self, g.right()));
            case FormulaKind::Exists: {
                Formula body = self(self, g.child());
                auto tuple = tuple_of(g.bound_var());
                Formula out =
                    guard_needed ? land(t.delta_at(tuple), std::move(body)) : std::move(body);
                for (auto it = tuple.rbegin(); it != tuple.rend(); ++it)
                    out = exists(*it, std::move(out));
                return out;
            }
            case FormulaKind::Forall: {
                // normalized to ~ex v. ~body before translating
                return self(self, lnot(exists(g.bound_var(), lnot(g.child()))));
            }
        }
        return g;
    };
    return rec(rec, f);
}

// ---------------------------------------------------------------------------
// compose: t after u, i.e. the translation of u's source language into t's
// target language (dimension t.dim * u.dim).
// ---------------------------------------------------------------------------

namespace detail {

// Renames "v<base>_<j>" tuple variables produced by translating a component
// whose free variables were `bases`, flattening to the given name function.
template <typename NameFn>
Formula flatten_tuple_vars(const Formula& f, const std::vector<Variable>& bases, int inner_dim,
                           NameFn&& name_of) {
    std::map<Variable, Variable> subst;
    for (std::size_t b = 0; b < bases.size(); ++b)
        for (int j = 0; j < inner_dim; ++j)
            subst[tuple_var(bases[b], j)] = name_of(static_cast<int>(b), j);
    return rename_free(f, subst);
}

} // namespace detail

inline Translation compose(const Translation& t, const Translation& u) {
    if (!(u.target_sig() == t.source_sig()))
        throw Error(ErrorKind::SignatureMismatch,
                    "compose: inner target signature differs from outer source signature");
    const int m = t.dim();
    const int n = u.dim();
    const int mn = m * n;

    // Coordinate (b, j): inner tuple slot b, outer coordinate j; flattened
    // index b*m + j.
    auto u_vars = u.expected_delta_vars();
    Formula delta = detail::flatten_tuple_vars(
        apply(t, u.delta()), u_vars, m,
        [&](int b, int j) { return detail::delta_var(b * m + j); });
    for (int b = 0; b < n; ++b) {
        std::vector<Variable> coord;
        for (int j = 0; j < m; ++j) coord.push_back(detail::delta_var(b * m + j));
        delta = land(std::move(delta), t.delta_at(coord));
    }

    Formula eta = detail::flatten_tuple_vars(
        apply(t, u.eta()), u.expected_eta_vars(), m, [&](int b, int j) {
            int side = b / n;
            int i = b % n;
            return detail::eta_var(side, i * m + j);
        });

    std::map<std::string, Formula> rels;
    for (const auto& [name, arity] : u.source_sig().relations()) {
        Formula phi = detail::flatten_tuple_vars(
            apply(t, u.rel_formula(name)), u.expected_rel_vars(arity), m, [&](int b, int j) {
                int slot = b / n;
                int i = b % n;
                return detail::rel_var(slot, i * m + j);
            });
        rels.emplace(name, std::move(phi));
    }

    return Translation(u.source_sig(), t.target_sig(), mn, std::move(delta), std::move(eta),
                       std::move(rels));
}

// ---------------------------------------------------------------------------
// flags: syntactic property detection against the literal patterns.
// ---------------------------------------------------------------------------

namespace detail {

inline Formula conj_chain(std::vector<Formula> parts) {
    Formula out = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) out = land(std::move(out), parts[i]);
    return out;
}

inline Formula unrelativized_pattern(int dim) {
    std::vector<Formula> parts;
    for (int i = 0; i < dim; ++i) parts.push_back(eq(delta_var(i), delta_var(i)));
    return conj_chain(std::move(parts));
}

inline Formula identity_preserving_pattern(int dim) {
    std::vector<Formula> parts;
    for (int i = 0; i < dim; ++i) parts.push_back(eq(eta_var(0, i), eta_var(1, i)));
    return conj_chain(std::move(parts));
}

} // namespace detail

// Translation-level flags: alpha-equality against the literal patterns
// "xbar = xbar" and "xbar1 = xbar2" (not the up-to-provable-equivalence
// interpretation-level notion).
inline TranslationFlags flags(const Translation& t) {
    bool unrel = alpha_equal(t.delta(), detail::unrelativized_pattern(t.dim()));
    bool idp = alpha_equal(t.eta(), detail::identity_preserving_pattern(t.dim()));
    return TranslationFlags{t.dim(), unrel, idp, t.dim() == 1 && unrel && idp};
}

// ---------------------------------------------------------------------------
// iso_conditions: the five closed formulas whose validity in a model says
// that iota defines an isomorphism between the two internal models.
// ---------------------------------------------------------------------------

inline std::vector<Formula> iso_conditions(const Translation& t1, const Translation& t2,
                                           const Formula& iota) {
    if (!(t1.target_sig() == t2.target_sig()))
        throw Error(ErrorKind::SignatureMismatch, "iso_conditions: target signatures differ");
    if (!(t1.source_sig() == t2.source_sig()))
        throw Error(ErrorKind::SignatureMismatch, "iso_conditions: source signatures differ");
    check_well_formed(iota, t1.target_sig(), /*allow_p=*/false);

    const int n1 = t1.dim();
    const int n2 = t2.dim();
    std::vector<Variable> left, right, left2, right2, expected;
    for (int i = 0; i < n1; ++i) left.push_back(detail::iota_left_var(i));
    for (int i = 0; i < n2; ++i) right.push_back(detail::iota_right_var(i));
    for (int i = 0; i < n1; ++i) left2.push_back("y" + std::to_string(i + 1));
    for (int i = 0; i < n2; ++i) right2.push_back("z" + std::to_string(i + 1) + "s");
    expected = left;
    expected.insert(expected.end(), right.begin(), right.end());
    {
        auto fv = free_vars(iota);
        for (const auto& v : fv)
            if (std::find(expected.begin(), expected.end(), v) == expected.end())
                throw Error(ErrorKind::ArityMismatch,
                            "iota has unexpected free variable '" + v + "'");
    }

    auto iota_at = [&](const std::vector<Variable>& l, const std::vector<Variable>& r) {
        std::map<Variable, Variable> subst;
        for (int i = 0; i < n1; ++i) subst[left[static_cast<std::size_t>(i)]] = l[static_cast<std::size_t>(i)];
        for (int i = 0; i < n2; ++i) subst[right[static_cast<std::size_t>(i)]] = r[static_cast<std::size_t>(i)];
        return rename_free(iota, subst);
    };

    std::vector<Formula> out;
    // 1. iota(x,xs) -> dom1(x) & dom2(xs)
    out.push_back(universal_closure(
        implies(iota_at(left, right), land(t1.delta_at(left), t2.delta_at(right)))));
    // 2. dom1(x) -> ex xs (dom2(xs) & iota(x,xs))
    {
        Formula body = land(t2.delta_at(right), iota_at(left, right));
        for (auto it = right.rbegin(); it != right.rend(); ++it) body = exists(*it, std::move(body));
        out.push_back(universal_closure(implies(t1.delta_at(left), std::move(body))));
    }
    // 3. dom2(xs) -> ex x (dom1(x) & iota(x,xs))
    {
        Formula body = land(t1.delta_at(left), iota_at(left, right));
        for (auto it = left.rbegin(); it != left.rend(); ++it) body = exists(*it, std::move(body));
        out.push_back(universal_closure(implies(t2.delta_at(right), std::move(body))));
    }
    // 4. iota(x,xs) -> (x =1 y <-> iota(y,xs)) & (xs =2 zs <-> iota(x,zs))
    {
        Formula eq_compat = land(iff(t1.eta_at(left, left2), iota_at(left2, right)),
                                 iff(t2.eta_at(right, right2), iota_at(left, right2)));
        out.push_back(universal_closure(implies(iota_at(left, right), std::move(eq_compat))));
    }
    // 5. conjunction over the signature: pointwise iota implies R1 <-> R2
    {
        std::vector<Formula> per_symbol;
        for (const auto& [name, arity] : t1.source_sig().relations()) {
            std::vector<std::vector<Variable>> ltuples, rtuples;
            std::vector<Formula> premises;
            for (int slot = 0; slot < arity; ++slot) {
                std::vector<Variable> l, r;
                for (int i = 0; i < n1; ++i)
                    l.push_back("a" + std::to_string(slot + 1) + "_" + std::to_string(i + 1));
                for (int i = 0; i < n2; ++i)
                    r.push_back("b" + std::to_string(slot + 1) + "_" + std::to_string(i + 1));
                premises.push_back(iota_at(l, r));
                ltuples.push_back(std::move(l));
                rtuples.push_back(std::move(r));
            }
            Formula premise = detail::conj_chain(std::move(premises));
            per_symbol.push_back(universal_closure(
                implies(std::move(premise),
                        iff(t1.rel_at(name, ltuples), t2.rel_at(name, rtuples)))));
        }
        out.push_back(per_symbol.empty() ? truth() : detail::conj_chain(std::move(per_symbol)));
    }
    return out;
}

} // namespace wb
