#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "wb/error.hpp"
#include "wb/model.hpp"
#include "wb/scheme.hpp"
#include "wb/second_order.hpp"
#include "wb/syntax.hpp"
#include "wb/translation.hpp"

// Randomized corpora and the property suites they drive: the translation
// lemma, composition coherence, the EF / quantifier-rank bridge, the
// linear-order law, definability-equals-invariance, quotient soundness and
// the strong-model enumeration oracle.
//
// The logic oracles here (rank-bounded agreement, definable subsets) work by
// exhausting formula extents level by level and never consult the game
// solver or the orbit machinery they are used to check.

namespace wb::corpus {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0, n)
    int below(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }

    bool coin() { return (engine_() & 1) != 0; }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Random objects.
// ---------------------------------------------------------------------------

inline FiniteStructure random_structure(Rng& rng, const Signature& sig, int size) {
    std::vector<std::string> universe;
    for (int i = 0; i < size; ++i) universe.push_back("e" + std::to_string(i));
    std::map<std::string, TupleSet> interp;
    for (const auto& [name, arity] : sig.relations()) {
        TupleSet tuples;
        for (const auto& t : detail::all_tuples(size, arity))
            if (rng.coin()) tuples.insert(t);
        interp.emplace(name, std::move(tuples));
    }
    return FiniteStructure(sig, std::move(universe), std::move(interp));
}

// Closed formula of quantifier rank <= rank.
inline Formula random_sentence(Rng& rng, const Signature& sig, int rank) {
    std::function<Formula(std::vector<Variable>&, int, int)> gen =
        [&](std::vector<Variable>& scope, int rank_left, int depth) -> Formula {
        int choice = rng.below(10);
        bool can_atom = !scope.empty();
        if ((choice < 4 && rank_left > 0) || (!can_atom && choice < 8)) {
            if (rank_left == 0) return rng.coin() ? truth() : falsity();
            Variable v = "q" + std::to_string(depth);
            scope.push_back(v);
            Formula body = gen(scope, rank_left - 1, depth + 1);
            scope.pop_back();
            return rng.coin() ? forall(v, std::move(body)) : exists(v, std::move(body));
        }
        if (choice < 7 && depth < 6) {
            Formula l = gen(scope, rank_left, depth + 1);
            Formula r = gen(scope, rank_left, depth + 1);
            switch (rng.below(4)) {
                case 0: return land(std::move(l), std::move(r));
                case 1: return lor(std::move(l), std::move(r));
                case 2: return implies(std::move(l), std::move(r));
                default: return iff(std::move(l), std::move(r));
            }
        }
        if (choice == 7 && depth < 6) return lnot(gen(scope, rank_left, depth + 1));
        if (!can_atom) return rng.coin() ? truth() : falsity();
        // atom
        std::vector<std::pair<std::string, int>> rels(sig.relations().begin(),
                                                      sig.relations().end());
        int pick = rng.below(static_cast<int>(rels.size()) + 1);
        if (pick == static_cast<int>(rels.size()))
            return eq(scope[static_cast<std::size_t>(rng.below(static_cast<int>(scope.size())))],
                      scope[static_cast<std::size_t>(rng.below(static_cast<int>(scope.size())))]);
        const auto& [name, arity] = rels[static_cast<std::size_t>(pick)];
        std::vector<Variable> args;
        for (int i = 0; i < arity; ++i)
            args.push_back(
                scope[static_cast<std::size_t>(rng.below(static_cast<int>(scope.size())))]);
        return atom(name, std::move(args));
    };
    std::vector<Variable> scope;
    return gen(scope, rank, 0);
}

// ---------------------------------------------------------------------------
// Standard fixtures.
// ---------------------------------------------------------------------------

inline Signature order_signature() {
    return Signature(std::map<std::string, int>{{"Leq", 2}});
}

// The n-element chain under a reflexive total order.
inline FiniteStructure chain(int n) {
    std::vector<std::string> universe;
    for (int i = 0; i < n; ++i) universe.push_back("e" + std::to_string(i));
    TupleSet leq;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) leq.insert({i, j});
    return FiniteStructure(order_signature(), std::move(universe), {{"Leq", std::move(leq)}});
}

// Single Succ-cycle of length n; with_zero marks e0.
inline FiniteStructure cycle(int n, bool with_zero = false) {
    Signature sig = with_zero ? Signature(std::map<std::string, int>{{"Zero", 1}, {"Succ", 2}})
                              : Signature(std::map<std::string, int>{{"Succ", 2}});
    std::vector<std::string> universe;
    for (int i = 0; i < n; ++i) universe.push_back("e" + std::to_string(i));
    TupleSet succ;
    for (int i = 0; i < n; ++i) succ.insert({i, (i + 1) % n});
    std::map<std::string, TupleSet> interp{{"Succ", std::move(succ)}};
    if (with_zero) interp.emplace("Zero", TupleSet{{0}});
    return FiniteStructure(sig, std::move(universe), std::move(interp));
}

// Disjoint union of two Succ-cycles, Zero on the first.
inline FiniteStructure two_cycles_with_zero(int n1, int n2) {
    Signature sig(std::map<std::string, int>{{"Zero", 1}, {"Succ", 2}});
    std::vector<std::string> universe;
    for (int i = 0; i < n1 + n2; ++i) universe.push_back("e" + std::to_string(i));
    TupleSet succ;
    for (int i = 0; i < n1; ++i) succ.insert({i, (i + 1) % n1});
    for (int i = 0; i < n2; ++i) succ.insert({n1 + i, n1 + (i + 1) % n2});
    return FiniteStructure(sig, std::move(universe),
                           {{"Succ", std::move(succ)}, {"Zero", TupleSet{{0}}}});
}

inline Translation reversal_translation() {
    Signature sig = order_signature();
    return Translation(sig, sig, 1, eq("x1", "x1"), eq("x1_1", "x2_1"),
                       {{"Leq", atom("Leq", {"v2_1", "v1_1"})}});
}

// Two-dimensional lexicographic pairing of an order with itself.
inline Translation lex_pair_translation() {
    Signature sig = order_signature();
    Formula delta = land(eq("x1", "x1"), eq("x2", "x2"));
    Formula eta = land(eq("x1_1", "x2_1"), eq("x1_2", "x2_2"));
    Formula leq = land(atom("Leq", {"v1_1", "v2_1"}),
                       implies(atom("Leq", {"v2_1", "v1_1"}), atom("Leq", {"v1_2", "v2_2"})));
    return Translation(sig, sig, 2, std::move(delta), std::move(eta), {{"Leq", std::move(leq)}});
}

inline std::vector<Translation> translation_pool() {
    return {identity_translation(order_signature()), reversal_translation(),
            lex_pair_translation()};
}

// The connected-cycle scheme over {Succ:2}: Succ is a bijection graph and
// every nonempty Succ-closed class is everything.
inline Scheme cycle_scheme() {
    Signature sig(std::map<std::string, int>{{"Succ", 2}});
    Formula total = forall("x", exists("y", atom("Succ", {"x", "y"})));
    Formula functional = forall(
        "x", forall("y", forall("z", implies(land(atom("Succ", {"x", "y"}),
                                                  atom("Succ", {"x", "z"})),
                                             eq("y", "z")))));
    Formula injective = forall(
        "x", forall("y", forall("z", implies(land(atom("Succ", {"x", "z"}),
                                                  atom("Succ", {"y", "z"})),
                                             eq("x", "y")))));
    Formula surjective = forall("y", exists("x", atom("Succ", {"x", "y"})));
    Formula bijection = land(land(land(total, functional), injective), surjective);
    Formula closed = forall(
        "x", forall("y", implies(land(atom(kSchemePredicate, {"x"}), atom("Succ", {"x", "y"})),
                                 atom(kSchemePredicate, {"y"}))));
    Formula connectivity = implies(land(exists("x", atom(kSchemePredicate, {"x"})), closed),
                                   forall("x", atom(kSchemePredicate, {"x"})));
    return Scheme(sig, land(bijection, connectivity));
}

// ---------------------------------------------------------------------------
// Rank-bounded first-order oracles.
//
// Extent-based: formulas with free variables x1..xj are represented by their
// extents over the assignment space(s). Starting from atomic extents, each
// rank step adds the projections of the atoms of the Boolean algebra
// generated so far. Agreement on every Boolean combination is equivalent to
// agreement on the generators.
// ---------------------------------------------------------------------------

namespace oracle {

using Extent = std::vector<bool>;

inline int pow_int(int base, int exp) {
    int out = 1;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

// Decodes assignment index -> values of x1..xj.
inline std::vector<int> decode(int index, int size, int j) {
    std::vector<int> out(static_cast<std::size_t>(j));
    for (int i = 0; i < j; ++i) {
        out[static_cast<std::size_t>(i)] = index % size;
        index /= size;
    }
    return out;
}

// Atomic extents over x1..xj for one structure.
inline std::vector<Extent> atomic_extents(const FiniteStructure& m, int j) {
    std::vector<Extent> out;
    int space = pow_int(m.size(), j);
    auto push = [&](const std::function<bool(const std::vector<int>&)>& pred) {
        Extent e(static_cast<std::size_t>(space));
        for (int idx = 0; idx < space; ++idx)
            e[static_cast<std::size_t>(idx)] = pred(decode(idx, m.size(), j));
        out.push_back(std::move(e));
    };
    for (int a = 0; a < j; ++a)
        for (int b = 0; b < j; ++b)
            push([a, b](const std::vector<int>& v) {
                return v[static_cast<std::size_t>(a)] == v[static_cast<std::size_t>(b)];
            });
    for (const auto& [name, arity] : m.sig().relations()) {
        const std::string& rel = name;
        const int ar = arity;
        std::vector<int> slots(static_cast<std::size_t>(ar), 0);
        auto walk = [&](auto&& self, int pos) -> void {
            if (pos == ar) {
                auto chosen = slots;
                push([&m, rel, chosen](const std::vector<int>& v) {
                    Tuple t;
                    for (int s : chosen) t.push_back(v[static_cast<std::size_t>(s)]);
                    return m.holds(rel, t);
                });
                return;
            }
            for (int s = 0; s < j; ++s) {
                slots[static_cast<std::size_t>(pos)] = s;
                self(self, pos + 1);
            }
        };
        if (j > 0) walk(walk, 0);
    }
    return out;
}

// Joint extent over two structures: one formula, one pair of extents.
struct JointExtent {
    Extent a, b;
    bool operator<(const JointExtent& o) const { return std::tie(a, b) < std::tie(o.a, o.b); }
    bool operator==(const JointExtent& o) const { return a == o.a && b == o.b; }
};

// Atoms of the Boolean algebra generated by `gens`: blocks of the signature
// partition of the joint point space.
inline std::vector<JointExtent> boolean_atoms(const std::vector<JointExtent>& gens, int space_a,
                                              int space_b) {
    std::map<std::vector<bool>, JointExtent> blocks;
    for (int p = 0; p < space_a + space_b; ++p) {
        std::vector<bool> signature;
        signature.reserve(gens.size());
        for (const auto& g : gens)
            signature.push_back(p < space_a ? g.a[static_cast<std::size_t>(p)]
                                            : g.b[static_cast<std::size_t>(p - space_a)]);
        auto [it, inserted] = blocks.try_emplace(
            signature, JointExtent{Extent(static_cast<std::size_t>(space_a)),
                                   Extent(static_cast<std::size_t>(space_b))});
        if (p < space_a) it->second.a[static_cast<std::size_t>(p)] = true;
        else it->second.b[static_cast<std::size_t>(p - space_a)] = true;
    }
    std::vector<JointExtent> out;
    for (auto& [_, block] : blocks) out.push_back(std::move(block));
    return out;
}

inline Extent project_exists(const Extent& e, int size, int j) {
    // drop the (j+1)-st variable: out[idx] = exists value of x_{j+1}
    int space = pow_int(size, j);
    Extent out(static_cast<std::size_t>(space), false);
    for (int idx = 0; idx < space; ++idx)
        for (int v = 0; v < size; ++v)
            if (e[static_cast<std::size_t>(idx + v * space)]) {
                out[static_cast<std::size_t>(idx)] = true;
                break;
            }
    return out;
}

// Generators of the rank-<=r fragment with free variables x1..xj, jointly
// over two structures.
inline std::vector<JointExtent> joint_generators(const FiniteStructure& m1,
                                                 const FiniteStructure& m2, int rank, int j) {
    std::vector<JointExtent> gens;
    auto add = [&](JointExtent e) {
        if (std::find(gens.begin(), gens.end(), e) == gens.end()) gens.push_back(std::move(e));
    };
    auto a1 = atomic_extents(m1, j);
    auto a2 = atomic_extents(m2, j);
    for (std::size_t i = 0; i < a1.size(); ++i) add(JointExtent{a1[i], a2[i]});
    if (rank == 0) return gens;
    auto inner = joint_generators(m1, m2, rank - 1, j + 1);
    auto atoms = boolean_atoms(inner, pow_int(m1.size(), j + 1), pow_int(m2.size(), j + 1));
    for (const auto& block : atoms)
        add(JointExtent{project_exists(block.a, m1.size(), j),
                        project_exists(block.b, m2.size(), j)});
    return gens;
}

// Do m1 and m2 agree on every sentence of quantifier rank <= k?
inline bool agree_up_to_rank(const FiniteStructure& m1, const FiniteStructure& m2, int k) {
    for (const auto& g : joint_generators(m1, m2, k, 0))
        if (g.a[0] != g.b[0]) return false;
    return true;
}

// Single-structure generators (same construction, one extent per formula).
inline std::vector<Extent> single_generators(const FiniteStructure& m, int rank, int j) {
    std::vector<Extent> gens;
    auto add = [&](Extent e) {
        if (std::find(gens.begin(), gens.end(), e) == gens.end()) gens.push_back(std::move(e));
    };
    for (auto& e : atomic_extents(m, j)) add(std::move(e));
    if (rank == 0) return gens;
    auto inner = single_generators(m, rank - 1, j + 1);
    // atoms of the algebra over the single point space
    std::map<std::vector<bool>, Extent> blocks;
    int space = pow_int(m.size(), j + 1);
    for (int p = 0; p < space; ++p) {
        std::vector<bool> signature;
        signature.reserve(inner.size());
        for (const auto& g : inner) signature.push_back(g[static_cast<std::size_t>(p)]);
        auto [it, _] = blocks.try_emplace(signature, Extent(static_cast<std::size_t>(space)));
        it->second[static_cast<std::size_t>(p)] = true;
    }
    for (auto& [_, block] : blocks) add(project_exists(block, m.size(), j));
    return gens;
}

// All subsets of m definable by a parameter-free formula of quantifier rank
// <= rank: unions of the atoms of the one-free-variable algebra.
inline std::set<std::set<int>> definable_subsets(const FiniteStructure& m, int rank) {
    auto gens = single_generators(m, rank, 1);
    std::map<std::vector<bool>, std::set<int>> blocks;
    for (int e = 0; e < m.size(); ++e) {
        std::vector<bool> signature;
        signature.reserve(gens.size());
        for (const auto& g : gens) signature.push_back(g[static_cast<std::size_t>(e)]);
        blocks[signature].insert(e);
    }
    std::vector<std::set<int>> atoms;
    for (auto& [_, block] : blocks) atoms.push_back(std::move(block));
    std::set<std::set<int>> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << atoms.size()); ++mask) {
        std::set<int> u;
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (mask & (std::size_t{1} << i)) u.insert(atoms[i].begin(), atoms[i].end());
        out.insert(std::move(u));
    }
    return out;
}

} // namespace oracle

// ---------------------------------------------------------------------------
// Suites.
// ---------------------------------------------------------------------------

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    int inconclusive = 0;  // CapExceeded cases
    std::vector<std::string> messages;

    bool ok() const { return failures == 0; }
};

namespace detail_suite {

// Ordered, deterministic parallel map: results land by index.
inline void parallel_cases(int cases, int jobs,
                           const std::function<void(int)>& run_case) {
    if (jobs <= 1) {
        for (int i = 0; i < cases; ++i) run_case(i);
        return;
    }
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w)
        workers.emplace_back([&, w]() {
            for (int i = w; i < cases; i += jobs) run_case(i);
        });
    for (auto& t : workers) t.join();
}

} // namespace detail_suite

// m |= apply(t, sigma)  iff  internal_model(m, t) |= sigma.
inline SuiteResult translation_lemma_suite(std::uint64_t seed, int cases, int jobs = 1) {
    SuiteResult result;
    result.name = "translation-lemma";
    auto pool = translation_pool();
    std::vector<char> failed(static_cast<std::size_t>(cases), 0);
    std::vector<std::string> notes(static_cast<std::size_t>(cases));
    detail_suite::parallel_cases(cases, jobs, [&](int i) {
        Rng rng(seed + static_cast<std::uint64_t>(i));
        const Translation& t = pool[static_cast<std::size_t>(rng.below(static_cast<int>(pool.size())))];
        int size = 1 + rng.below(t.dim() >= 2 ? 4 : 5);
        FiniteStructure m = random_structure(rng, order_signature(), size);
        Formula sigma = random_sentence(rng, order_signature(), 3);
        bool lhs = eval(m, apply(t, sigma));
        bool rhs = internal_model(m, t).satisfies(sigma);
        if (lhs != rhs) {
            failed[static_cast<std::size_t>(i)] = 1;
            notes[static_cast<std::size_t>(i)] =
                "case " + std::to_string(i) + ": " + print(sigma);
        }
    });
    result.cases = cases;
    for (int i = 0; i < cases; ++i)
        if (failed[static_cast<std::size_t>(i)]) {
            ++result.failures;
            result.messages.push_back(notes[static_cast<std::size_t>(i)]);
        }
    return result;
}

namespace detail_suite {

// Index bijection between the two internal-model constructions for composed
// translations over full (unrelativized) domains, verified relation by
// relation.
inline bool composed_models_isomorphic(const FiniteStructure& m, const Translation& t,
                                       const Translation& u) {
    Translation comp = compose(t, u);
    FiniteStructure lhs = internal_model(m, comp).structure;
    FiniteStructure mid = internal_model(m, t).structure;
    FiniteStructure rhs = internal_model(mid, u).structure;
    if (lhs.size() != rhs.size()) return false;

    const int msize = m.size();
    const int tdim = t.dim();
    const int udim = u.dim();
    // RHS outer index decodes to a u-dim tuple of mid indices; each mid
    // index decodes to a t-dim tuple over m; the concatenation is the LHS
    // flat tuple. Positions are matched through all_tuples order.
    std::vector<Tuple> lhs_tuples = wb::detail::all_tuples(msize, tdim * udim);
    std::map<Tuple, int> lhs_pos;
    for (std::size_t i = 0; i < lhs_tuples.size(); ++i)
        lhs_pos[lhs_tuples[i]] = static_cast<int>(i);
    std::vector<Tuple> mid_tuples = wb::detail::all_tuples(msize, tdim);
    std::vector<Tuple> outer_tuples = wb::detail::all_tuples(mid.size(), udim);

    std::vector<int> map(static_cast<std::size_t>(rhs.size()));
    for (std::size_t r = 0; r < outer_tuples.size(); ++r) {
        Tuple flat;
        for (int inner : outer_tuples[r]) {
            const Tuple& part = mid_tuples[static_cast<std::size_t>(inner)];
            flat.insert(flat.end(), part.begin(), part.end());
        }
        map[r] = lhs_pos.at(flat);
    }
    for (const auto& [name, arity] : lhs.sig().relations()) {
        for (const auto& tup : wb::detail::all_tuples(rhs.size(), arity)) {
            Tuple mapped;
            for (int e : tup) mapped.push_back(map[static_cast<std::size_t>(e)]);
            if (rhs.holds(name, tup) != lhs.holds(name, mapped)) return false;
        }
    }
    return true;
}

} // namespace detail_suite

// apply(compose(t,u), sigma) agrees with apply(t, apply(u, sigma)), and the
// two internal-model constructions are isomorphic.
inline SuiteResult composition_suite(std::uint64_t seed, int cases, int jobs = 1) {
    SuiteResult result;
    result.name = "composition";
    auto pool = translation_pool();
    std::vector<char> failed(static_cast<std::size_t>(cases), 0);
    detail_suite::parallel_cases(cases, jobs, [&](int i) {
        Rng rng(seed * 31 + static_cast<std::uint64_t>(i));
        const Translation& t = pool[static_cast<std::size_t>(rng.below(static_cast<int>(pool.size())))];
        const Translation& u = pool[static_cast<std::size_t>(rng.below(static_cast<int>(pool.size())))];
        int mn = t.dim() * u.dim();
        int max_size = mn >= 4 ? 3 : (mn >= 2 ? 4 : 5);
        FiniteStructure m = random_structure(rng, order_signature(), 1 + rng.below(max_size));
        Formula sigma = random_sentence(rng, order_signature(), 2);
        Translation comp = compose(t, u);
        bool one_pass = eval(m, apply(comp, sigma));
        bool two_pass = eval(m, apply(t, apply(u, sigma)));
        bool iso = detail_suite::composed_models_isomorphic(m, t, u);
        if (one_pass != two_pass || !iso) failed[static_cast<std::size_t>(i)] = 1;
    });
    result.cases = cases;
    for (char f : failed)
        if (f) ++result.failures;
    return result;
}

// Deterministic fixture pool of structures over one binary symbol.
inline std::vector<FiniteStructure> ef_fixture_pool(std::uint64_t seed, int count, int max_size) {
    Signature sig(std::map<std::string, int>{{"R", 2}});
    std::vector<FiniteStructure> out;
    // chains and cycles first, then seeded randoms
    for (int n = 1; n <= max_size && static_cast<int>(out.size()) < count; ++n) {
        TupleSet chain_rel;
        for (int i = 0; i + 1 < n; ++i) chain_rel.insert({i, i + 1});
        std::vector<std::string> universe;
        for (int i = 0; i < n; ++i) universe.push_back("e" + std::to_string(i));
        out.emplace_back(sig, universe, std::map<std::string, TupleSet>{{"R", chain_rel}});
        if (static_cast<int>(out.size()) < count && n >= 2) {
            TupleSet cyc;
            for (int i = 0; i < n; ++i) cyc.insert({i, (i + 1) % n});
            out.emplace_back(sig, universe, std::map<std::string, TupleSet>{{"R", cyc}});
        }
    }
    Rng rng(seed);
    while (static_cast<int>(out.size()) < count)
        out.push_back(random_structure(rng, sig, 1 + rng.below(max_size)));
    return out;
}

// ef_game agrees with the rank-agreement oracle on all pairs from the pool.
inline SuiteResult ef_bridge_suite(std::uint64_t seed, int pool_size = 30, int max_size = 4,
                                   int max_rounds = 2, int jobs = 1) {
    SuiteResult result;
    result.name = "ef-bridge";
    auto pool = ef_fixture_pool(seed, pool_size, max_size);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < static_cast<int>(pool.size()); ++i)
        for (int j = i; j < static_cast<int>(pool.size()); ++j) pairs.emplace_back(i, j);
    std::vector<char> failed(pairs.size() * static_cast<std::size_t>(max_rounds + 1), 0);
    detail_suite::parallel_cases(static_cast<int>(pairs.size()), jobs, [&](int p) {
        const auto& [i, j] = pairs[static_cast<std::size_t>(p)];
        for (int k = 0; k <= max_rounds; ++k) {
            bool game = ef_game(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)], k).winner ==
                        EfWinner::Duplicator;
            bool logic = oracle::agree_up_to_rank(pool[static_cast<std::size_t>(i)],
                                                  pool[static_cast<std::size_t>(j)], k);
            if (game != logic)
                failed[static_cast<std::size_t>(p) * static_cast<std::size_t>(max_rounds + 1) +
                       static_cast<std::size_t>(k)] = 1;
        }
    });
    result.cases = static_cast<int>(pairs.size()) * (max_rounds + 1);
    for (char f : failed)
        if (f) ++result.failures;
    return result;
}

// Duplicator wins the k-round game on chains of lengths a, b iff a = b or
// min(a,b) >= 2^k - 1.
inline SuiteResult linear_order_suite(int max_len = 9, int max_rounds = 3, int jobs = 1) {
    SuiteResult result;
    result.name = "linear-order-law";
    std::vector<std::tuple<int, int, int>> cases;
    for (int a = 2; a <= max_len; ++a)
        for (int b = 2; b <= max_len; ++b)
            for (int k = 0; k <= max_rounds; ++k) cases.emplace_back(a, b, k);
    std::vector<char> failed(cases.size(), 0);
    detail_suite::parallel_cases(static_cast<int>(cases.size()), jobs, [&](int i) {
        auto [a, b, k] = cases[static_cast<std::size_t>(i)];
        bool dup = ef_game(chain(a), chain(b), k).winner == EfWinner::Duplicator;
        bool law = a == b || std::min(a, b) >= (1 << k) - 1;
        if (dup != law) failed[static_cast<std::size_t>(i)] = 1;
    });
    result.cases = static_cast<int>(cases.size());
    for (char f : failed)
        if (f) ++result.failures;
    return result;
}

// Deterministic pool over <= 2 unary + 1 binary symbols, sizes 1..3.
inline std::vector<FiniteStructure> definability_fixture_pool(std::uint64_t seed, int count) {
    Signature sig(std::map<std::string, int>{{"C1", 1}, {"C2", 1}, {"R", 2}});
    std::vector<FiniteStructure> out;
    // pure sets, a chain, a colored set
    for (int n = 1; n <= 3; ++n) {
        std::vector<std::string> universe;
        for (int i = 0; i < n; ++i) universe.push_back("e" + std::to_string(i));
        out.emplace_back(sig, universe, std::map<std::string, TupleSet>{});
    }
    {
        TupleSet lt;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) lt.insert({i, j});
        out.emplace_back(sig, std::vector<std::string>{"e0", "e1", "e2"},
                         std::map<std::string, TupleSet>{{"R", lt}});
        out.emplace_back(sig, std::vector<std::string>{"e0", "e1", "e2"},
                         std::map<std::string, TupleSet>{{"C1", TupleSet{{0}}}});
    }
    Rng rng(seed);
    while (static_cast<int>(out.size()) < count) out.push_back(random_structure(rng, sig, 1 + rng.below(3)));
    return out;
}

// invariant_relations(m, 1) matches the formula-enumeration oracle.
inline SuiteResult definability_suite(std::uint64_t seed, int pool_size = 20, int jobs = 1) {
    SuiteResult result;
    result.name = "definability-invariance";
    auto pool = definability_fixture_pool(seed, pool_size);
    std::vector<char> failed(pool.size(), 0);
    std::vector<char> capped(pool.size(), 0);
    detail_suite::parallel_cases(static_cast<int>(pool.size()), jobs, [&](int i) {
        const auto& m = pool[static_cast<std::size_t>(i)];
        std::set<std::set<int>> invariant;
        try {
            for (const auto& member : invariant_relations(m, 1)) {
                std::set<int> s;
                for (const auto& t : member) s.insert(t[0]);
                invariant.insert(std::move(s));
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::CapExceeded) {
                capped[static_cast<std::size_t>(i)] = 1;
                return;
            }
            throw;
        }
        auto definable = oracle::definable_subsets(m, m.size());
        if (invariant != definable) failed[static_cast<std::size_t>(i)] = 1;
    });
    result.cases = static_cast<int>(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (failed[i]) ++result.failures;
        if (capped[i]) ++result.inconclusive;
    }
    return result;
}

// Random structure with a built-in congruence: relations are pulled back
// along a random surjection, E is its kernel.
inline std::pair<FiniteStructure, Formula> random_congruence_structure(Rng& rng, int max_size) {
    Signature sig(std::map<std::string, int>{{"R", 2}, {"E", 2}});
    int size = 1 + rng.below(max_size);
    int q_size = 1 + rng.below(size);
    std::vector<int> onto(static_cast<std::size_t>(size));
    for (int i = 0; i < q_size; ++i) onto[static_cast<std::size_t>(i)] = i;
    for (int i = q_size; i < size; ++i) onto[static_cast<std::size_t>(i)] = rng.below(q_size);
    TupleSet base;
    for (int a = 0; a < q_size; ++a)
        for (int b = 0; b < q_size; ++b)
            if (rng.coin()) base.insert({a, b});
    TupleSet r_rel, e_rel;
    for (int a = 0; a < size; ++a)
        for (int b = 0; b < size; ++b) {
            if (base.count({onto[static_cast<std::size_t>(a)], onto[static_cast<std::size_t>(b)]}))
                r_rel.insert({a, b});
            if (onto[static_cast<std::size_t>(a)] == onto[static_cast<std::size_t>(b)])
                e_rel.insert({a, b});
        }
    std::vector<std::string> universe;
    for (int i = 0; i < size; ++i) universe.push_back("e" + std::to_string(i));
    FiniteStructure m(sig, std::move(universe), {{"R", std::move(r_rel)}, {"E", std::move(e_rel)}});
    return {std::move(m), atom("E", {"x", "y"})};
}

// eta-semantics evaluation on m equals standard evaluation on quotient(m, eta).
inline SuiteResult quotient_suite(std::uint64_t seed, int cases, int jobs = 1) {
    SuiteResult result;
    result.name = "quotient-soundness";
    std::vector<char> failed(static_cast<std::size_t>(cases), 0);
    detail_suite::parallel_cases(cases, jobs, [&](int i) {
        Rng rng(seed * 77 + static_cast<std::uint64_t>(i));
        auto [m, eta] = random_congruence_structure(rng, 5);
        Formula sigma = random_sentence(rng, m.sig(), 3);
        TupleSet eq_rel = binary_extension(m, eta);
        bool via_eta = eval_eta_semantics(m, sigma, eq_rel);
        bool via_quotient = eval(quotient(m, eta), sigma);
        if (via_eta != via_quotient) failed[static_cast<std::size_t>(i)] = 1;
    });
    result.cases = cases;
    for (char f : failed)
        if (f) ++result.failures;
    return result;
}

// Independent re-enumeration of strong-model tuples by direct loops.
inline std::vector<ModelTuple> naive_strong_models(const SOStructure& so, const Scheme& tau,
                                                   const Caps& caps = {}) {
    std::vector<ModelTuple> out;
    auto unary = so.classes.members(1, so.ground.size(), caps);
    auto binary = so.classes.members(2, so.ground.size(), caps);
    std::vector<std::string> symbols;
    for (const auto& [name, _] : tau.sig.relations()) symbols.push_back(name);

    for (const auto& dom_member : unary) {
        std::set<int> dom;
        for (const auto& t : dom_member) dom.insert(t[0]);
        if (dom.empty()) continue;
        for (const auto& eq : binary) {
            bool inside = std::all_of(eq.begin(), eq.end(), [&](const Tuple& t) {
                return dom.count(t[0]) && dom.count(t[1]);
            });
            if (!inside) continue;
            // reflexive, symmetric, transitive on dom
            bool equivalence = true;
            for (int a : dom)
                if (!eq.count({a, a})) equivalence = false;
            for (const auto& t : eq)
                if (!eq.count({t[1], t[0]})) equivalence = false;
            for (const auto& t1 : eq)
                for (const auto& t2 : eq)
                    if (t1[1] == t2[0] && !eq.count({t1[0], t2[1]})) equivalence = false;
            if (!equivalence) continue;

            std::vector<std::vector<TupleSet>> choices;
            for (const auto& name : symbols) {
                int arity = tau.sig.arity(name);
                std::vector<TupleSet> ok;
                for (const auto& member : so.classes.members(arity, so.ground.size(), caps)) {
                    bool in_dom = std::all_of(member.begin(), member.end(), [&](const Tuple& t) {
                        return std::all_of(t.begin(), t.end(),
                                           [&](int e) { return dom.count(e) != 0; });
                    });
                    if (in_dom) ok.push_back(member);
                }
                choices.push_back(std::move(ok));
            }
            // congruence and strong-model tests spelled out longhand
            auto congruent = [&](const std::map<std::string, TupleSet>& rels) {
                for (const auto& [name, rel] : rels) {
                    for (const auto& t : rel) {
                        std::vector<std::vector<int>> mates;
                        for (int e : t) {
                            std::vector<int> row;
                            for (int d : dom)
                                if (eq.count({e, d})) row.push_back(d);
                            mates.push_back(std::move(row));
                        }
                        std::vector<std::size_t> idx(t.size(), 0);
                        bool done = false;
                        while (!done) {
                            Tuple probe;
                            for (std::size_t q = 0; q < t.size(); ++q)
                                probe.push_back(mates[q][idx[q]]);
                            if (!rel.count(probe)) return false;
                            std::size_t q = 0;
                            while (q < idx.size() && ++idx[q] == mates[q].size()) {
                                idx[q] = 0;
                                ++q;
                            }
                            done = q == idx.size();
                        }
                    }
                }
                return true;
            };
            auto strong = [&](const std::map<std::string, TupleSet>& rels) {
                FiniteStructure st(tau.sig, so.ground.universe(), rels);
                for (const auto& y_member : unary) {
                    std::set<int> y;
                    for (const auto& t : y_member) y.insert(t[0]);
                    bool in_dom = std::all_of(y.begin(), y.end(),
                                              [&](int e) { return dom.count(e) != 0; });
                    if (!in_dom) continue;
                    bool invariant = true;
                    for (int a : y)
                        for (int d : dom)
                            if (eq.count({a, d}) && !y.count(d)) invariant = false;
                    if (!invariant) continue;
                    EvalOptions opts;
                    opts.p_extension = &y;
                    opts.eq_relation = &eq;
                    opts.domain = &dom;
                    if (!eval(st, tau.body, {}, opts)) return false;
                }
                return true;
            };
            std::vector<std::size_t> pick(symbols.size(), 0);
            auto loop = [&](auto&& self, std::size_t s) -> void {
                if (s == symbols.size()) {
                    std::map<std::string, TupleSet> rels;
                    for (std::size_t q = 0; q < symbols.size(); ++q)
                        rels[symbols[q]] = choices[q][pick[q]];
                    if (!congruent(rels)) return;
                    if (strong(rels)) {
                        ModelTuple cand;
                        cand.dom = dom;
                        cand.eq = eq;
                        cand.rels = std::move(rels);
                        out.push_back(std::move(cand));
                    }
                    return;
                }
                for (pick[s] = 0; pick[s] < choices[s].size(); ++pick[s]) self(self, s + 1);
            };
            loop(loop, 0);
        }
    }
    return out;
}

// x_strong_models matches the naive oracle on small second-order fixtures.
inline SuiteResult enumeration_oracle_suite(int jobs = 1) {
    SuiteResult result;
    result.name = "enumeration-oracle";
    (void)jobs;
    std::vector<SOStructure> fixtures;
    {
        Signature sig(std::map<std::string, int>{{"Succ", 2}});
        std::vector<std::string> u3 = {"e0", "e1", "e2"};
        TupleSet cyc = {{0, 1}, {1, 2}, {2, 0}};
        FiniteStructure ground(sig, u3, {{"Succ", cyc}});
        fixtures.push_back(SOStructure{ground, ClassFamily::full(2)});
    }
    {
        FiniteStructure ground = cycle(3, /*with_zero=*/true);
        fixtures.push_back(SOStructure{ground, mk_defpf_family(ground, 2)});
    }
    {
        Signature sig(std::map<std::string, int>{{"Succ", 2}});
        std::vector<std::string> u2 = {"e0", "e1"};
        FiniteStructure ground(sig, u2, {{"Succ", TupleSet{{0, 1}}}});
        fixtures.push_back(SOStructure{ground, ClassFamily::full(2)});
    }
    Scheme cyc_scheme = cycle_scheme();
    Scheme ind = build_ind();
    for (const auto& so : fixtures) {
        const Scheme& tau = so.ground.sig().has("Zero") ? ind : cyc_scheme;
        ++result.cases;
        auto fast = x_strong_models(so, tau);
        auto naive = naive_strong_models(so, tau);
        auto key = [](const ModelTuple& t) {
            std::ostringstream os;
            for (int e : t.dom) os << e << ",";
            os << "|";
            for (const auto& p : t.eq) os << p[0] << p[1] << ",";
            os << "|";
            for (const auto& [name, rel] : t.rels) {
                os << name << ":";
                for (const auto& tup : rel) {
                    for (int e : tup) os << e << ".";
                    os << ",";
                }
            }
            return os.str();
        };
        std::set<std::string> a, b;
        for (const auto& t : fast) a.insert(key(t));
        for (const auto& t : naive) b.insert(key(t));
        if (a != b) {
            ++result.failures;
            result.messages.push_back("enumeration mismatch: " + std::to_string(fast.size()) +
                                      " vs " + std::to_string(naive.size()));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Corpus runner.
// ---------------------------------------------------------------------------

struct CorpusConfig {
    std::uint64_t seed = 20240915;
    int jobs = 1;
    std::vector<std::string> suites = {"translation-lemma", "composition", "ef-bridge",
                                       "linear-order-law", "definability-invariance",
                                       "quotient-soundness", "enumeration-oracle"};
    std::map<std::string, int> cases = {{"translation-lemma", 200},
                                        {"composition", 100},
                                        {"quotient-soundness", 100}};
};

inline std::vector<SuiteResult> run_corpus(const CorpusConfig& config) {
    std::vector<SuiteResult> results;
    auto cases_for = [&](const std::string& name, int fallback) {
        auto it = config.cases.find(name);
        return it == config.cases.end() ? fallback : it->second;
    };
    for (const auto& name : config.suites) {
        if (name == "translation-lemma")
            results.push_back(translation_lemma_suite(config.seed, cases_for(name, 200), config.jobs));
        else if (name == "composition")
            results.push_back(composition_suite(config.seed, cases_for(name, 100), config.jobs));
        else if (name == "ef-bridge")
            results.push_back(ef_bridge_suite(config.seed, 30, 4, 2, config.jobs));
        else if (name == "linear-order-law")
            results.push_back(linear_order_suite(9, 3, config.jobs));
        else if (name == "definability-invariance")
            results.push_back(definability_suite(config.seed, 20, config.jobs));
        else if (name == "quotient-soundness")
            results.push_back(quotient_suite(config.seed, cases_for(name, 100), config.jobs));
        else if (name == "enumeration-oracle")
            results.push_back(enumeration_oracle_suite(config.jobs));
        else
            throw Error(ErrorKind::BadInput, "unknown suite '" + name + "'");
    }
    return results;
}

} // namespace wb::corpus
