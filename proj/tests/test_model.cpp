#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "wb/corpus.hpp"
#include "wb/model.hpp"
#include "wb/scheme.hpp"
#include "wb/syntax.hpp"

using namespace wb;

namespace {

FiniteStructure pure_set(int n) {
    std::vector<std::string> universe;
    for (int i = 0; i < n; ++i) universe.push_back(std::string(1, static_cast<char>('a' + i)));
    return FiniteStructure(Signature(), std::move(universe), {});
}

} // namespace

TEST_CASE("structure invariants") {
    CHECK_THROWS_AS(FiniteStructure(Signature(), {}, {}), Error);
    CHECK_THROWS_AS(FiniteStructure(Signature(), {"a", "a"}, {}), Error);
    Signature sig({{"R", 2}});
    CHECK_THROWS_AS(FiniteStructure(sig, {"a"}, {{"R", TupleSet{{0}}}}), Error);
    CHECK_THROWS_AS(FiniteStructure(sig, {"a"}, {{"R", TupleSet{{0, 5}}}}), Error);
    // unlisted relations default to empty
    FiniteStructure m(sig, {"a"}, {});
    CHECK(m.relation("R").empty());
}

TEST_CASE("eval basics") {
    FiniteStructure three = corpus::chain(3);
    CHECK(eval(three, parse("ex x. all y. Leq(x,y)", three.sig())));
    CHECK(!eval(three, parse("ex x. all y. Leq(y,x) & ~(x = x)", three.sig())));
    CHECK(eval(three, eq("x", "x"), {{"x", 1}}));

    FiniteStructure cyc = corpus::cycle(3);
    CHECK(eval(cyc, parse("all x. ex y. Succ(x,y)", cyc.sig())));
    CHECK(!eval(cyc, parse("ex x. Succ(x,x)", cyc.sig())));

    try {
        eval(three, atom("Leq", {"x", "y"}), {{"x", 0}});
        FAIL("expected UnboundVariable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnboundVariable);
    }
}

TEST_CASE("eval with equality override and domain restriction") {
    FiniteStructure cyc = corpus::cycle(4);
    TupleSet pair_eq;  // opposite elements identified
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i % 2 == j % 2) pair_eq.insert({i, j});
    CHECK(eval_eta_semantics(cyc, parse("ex x. ex y. (~(x = y) & (all z. (z = x | z = y)))",
                                        cyc.sig()),
                             pair_eq));
    std::set<int> dom = {0, 1};
    EvalOptions opts;
    opts.domain = &dom;
    CHECK(eval(cyc, parse("ex x. ex y. Succ(x,y)", cyc.sig()), {}, opts));
    CHECK(!eval(cyc, parse("all x. ex y. Succ(y,x)", cyc.sig()), {}, opts));
}

TEST_CASE("automorphisms") {
    CHECK(automorphisms(pure_set(3)).size() == 6);
    CHECK(automorphisms(corpus::chain(3)).size() == 1);
    auto rotations = automorphisms(corpus::cycle(3));
    REQUIRE(rotations.size() == 3);
    // deterministic order: identity first
    CHECK(rotations[0] == std::vector<int>{0, 1, 2});
}

TEST_CASE("invariant_relations") {
    SECTION("pure 3-set, arity 1") {
        auto fams = invariant_relations(pure_set(3), 1);
        REQUIRE(fams.size() == 2);
        CHECK(fams[0].empty());
        CHECK(fams[1].size() == 3);
    }
    SECTION("colored 3-set") {
        Signature sig({{"Color", 1}});
        FiniteStructure m(sig, {"a", "b", "c"}, {{"Color", TupleSet{{0}}}});
        auto fams = invariant_relations(m, 1);
        REQUIRE(fams.size() == 4);
        std::set<std::set<int>> as_sets;
        for (const auto& f : fams) {
            std::set<int> s;
            for (const auto& t : f) s.insert(t[0]);
            as_sets.insert(s);
        }
        CHECK(as_sets == std::set<std::set<int>>{{}, {0}, {1, 2}, {0, 1, 2}});
    }
    SECTION("empty set and universe always appear") {
        corpus::Rng rng(21);
        for (int i = 0; i < 10; ++i) {
            FiniteStructure m =
                corpus::random_structure(rng, corpus::order_signature(), 1 + rng.below(3));
            auto fams = invariant_relations(m, 1);
            CHECK(fams.front().empty());
            CHECK(fams.back().size() == static_cast<std::size_t>(m.size()));
        }
    }
    SECTION("arity and cap validation") {
        CHECK_THROWS_AS(invariant_relations(pure_set(2), 0), Error);
        Caps tight;
        tight.max_tuples = 3;
        CHECK_THROWS_AS(invariant_relations(pure_set(2), 2, tight), Error);
    }
}

TEST_CASE("quotient") {
    Signature sig = corpus::order_signature();
    SECTION("absolute equality is a no-op") {
        FiniteStructure three = corpus::chain(3);
        FiniteStructure q = quotient(three, eq("x", "y"));
        CHECK(q.size() == 3);
        CHECK(q.relation("Leq") == three.relation("Leq"));
    }
    SECTION("preorder collapses to a 2-chain") {
        // a <= b <= a <= c
        TupleSet leq = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 0}, {0, 2}, {1, 2}};
        FiniteStructure pre(sig, {"a", "b", "c"}, {{"Leq", leq}});
        FiniteStructure q = quotient(pre, parse("Leq(x,y) & Leq(y,x)", sig));
        REQUIRE(q.size() == 2);
        CHECK(find_isomorphism(q, corpus::chain(2)).has_value());
    }
    SECTION("non-equivalence and non-congruence are reported") {
        FiniteStructure three = corpus::chain(3);
        try {
            quotient(three, atom("Leq", {"x", "y"}));  // not symmetric
            FAIL("expected NotEquivalence");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotEquivalence);
        }
        // total relation but Leq distinguishes elements
        Signature csig({{"C", 1}});
        FiniteStructure colored(csig, {"a", "b"}, {{"C", TupleSet{{0}}}});
        try {
            quotient(colored, truth());
            FAIL("expected NotCongruence");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotCongruence);
            CHECK(std::string(e.what()).find("C") != std::string::npos);
        }
    }
}

TEST_CASE("internal_model") {
    SECTION("identity carves the structure itself") {
        FiniteStructure three = corpus::chain(3);
        InternalModel im = internal_model(three, identity_translation(three.sig()));
        CHECK(im.structure.universe() == three.universe());
        CHECK(im.structure.relation("Leq") == three.relation("Leq"));
    }
    SECTION("reversal carves the reversed chain") {
        FiniteStructure three = corpus::chain(3);
        InternalModel im = internal_model(three, corpus::reversal_translation());
        CHECK(im.structure.holds("Leq", {2, 0}));
        CHECK(!im.structure.holds("Leq", {0, 2}));
        auto iso = find_isomorphism(im.structure, three);
        REQUIRE(iso.has_value());
        CHECK(*iso == std::vector<int>{2, 1, 0});
    }
    SECTION("lexicographic pairing of the 2-chain is the 4-chain") {
        FiniteStructure two = corpus::chain(2);
        InternalModel im = internal_model(two, corpus::lex_pair_translation());
        REQUIRE(im.structure.size() == 4);
        Signature sig = corpus::order_signature();
        CHECK(eval(im.structure, parse("all x. all y. (Leq(x,y) | Leq(y,x))", sig)));
        CHECK(eval(im.structure,
                   parse("all x. all y. ((Leq(x,y) & Leq(y,x)) -> x = y)", sig)));
        CHECK(find_isomorphism(im.structure, corpus::chain(4)).has_value());
    }
}

TEST_CASE("find_isomorphism") {
    FiniteStructure cyc3 = corpus::cycle(3);
    SECTION("identity on itself") {
        auto iso = find_isomorphism(cyc3, cyc3);
        REQUIRE(iso.has_value());
        CHECK(*iso == std::vector<int>{0, 1, 2});
    }
    SECTION("size mismatch") {
        CHECK(!find_isomorphism(cyc3, corpus::cycle(4)).has_value());
    }
    SECTION("chain against its reversal") {
        FiniteStructure three = corpus::chain(3);
        FiniteStructure rev = internal_model(three, corpus::reversal_translation()).structure;
        auto iso = find_isomorphism(three, rev);
        REQUIRE(iso.has_value());
        CHECK(*iso == std::vector<int>{2, 1, 0});
    }
    SECTION("same size, not isomorphic") {
        Signature sig({{"R", 2}});
        FiniteStructure a(sig, {"x", "y"}, {{"R", TupleSet{{0, 0}}}});
        FiniteStructure b(sig, {"x", "y"}, {{"R", TupleSet{{0, 1}}}});
        CHECK(!find_isomorphism(a, b).has_value());
    }
}

TEST_CASE("ef_game") {
    FiniteStructure three = corpus::chain(3);
    FiniteStructure four = corpus::chain(4);
    CHECK(ef_game(three, three, 3).winner == EfWinner::Duplicator);
    CHECK(ef_game(three, four, 2).winner == EfWinner::Duplicator);
    EfResult r = ef_game(three, four, 3);
    CHECK(r.winner == EfWinner::Spoiler);
    CHECK(!r.trace.empty());
    CHECK(r.trace.front().round == 1);
    // round 0 is always a Duplicator win in a relational language
    CHECK(ef_game(three, four, 0).winner == EfWinner::Duplicator);
}

TEST_CASE("bf_system") {
    FiniteStructure three = corpus::chain(3);
    SECTION("structure against itself") {
        auto sys = bf_system(three, three);
        REQUIRE(sys.has_value());
        bool has_identity_fragment = false;
        for (const auto& f : sys->maps)
            if (f == wb::detail::PairList{{0, 0}, {1, 1}, {2, 2}}) has_identity_fragment = true;
        CHECK(has_identity_fragment);
    }
    SECTION("chain against its reversal") {
        FiniteStructure rev = internal_model(three, corpus::reversal_translation()).structure;
        CHECK(bf_system(three, rev).has_value());
    }
    SECTION("different chains have no system") {
        CHECK(!bf_system(three, corpus::chain(4)).has_value());
    }
    SECTION("nonempty exactly when isomorphic, on a random corpus") {
        corpus::Rng rng(5);
        Signature sig({{"R", 2}});
        for (int i = 0; i < 15; ++i) {
            FiniteStructure a = corpus::random_structure(rng, sig, 1 + rng.below(3));
            FiniteStructure b = corpus::random_structure(rng, sig, 1 + rng.below(3));
            CHECK(bf_system(a, b).has_value() == find_isomorphism(a, b).has_value());
        }
    }
}

TEST_CASE("strong_model_check") {
    Scheme ind = build_ind();
    SECTION("a single cycle with one zero is strong for induction") {
        auto report = strong_model_check(corpus::cycle(3, true), std::nullopt, ind);
        CHECK(report.ok);
    }
    SECTION("two cycles fail with the zero component as counterexample") {
        auto report = strong_model_check(corpus::two_cycles_with_zero(3, 3), std::nullopt, ind);
        REQUIRE(!report.ok);
        CHECK(*report.counterexample == std::set<int>{0, 1, 2});
    }
    SECTION("a total equality symbol shrinks the subset lattice") {
        // adjoin E as the total relation: only the empty set and the whole
        // universe are invariant, and induction holds for both
        Signature sig({{"Zero", 1}, {"Succ", 2}, {"E", 2}});
        FiniteStructure base = corpus::two_cycles_with_zero(3, 3);
        TupleSet total;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) total.insert({i, j});
        FiniteStructure m(sig, base.universe(),
                          {{"Zero", base.relation("Zero")},
                           {"Succ", base.relation("Succ")},
                           {"E", total}});
        auto report = strong_model_check(m, std::string("E"), ind);
        CHECK(report.ok);
    }
    SECTION("caps fail loudly") {
        Caps tight;
        tight.max_invariant_classes = 2;
        CHECK_THROWS_AS(strong_model_check(corpus::cycle(3, true), std::nullopt, ind, tight),
                        Error);
    }
}

TEST_CASE("strong model check agrees with the invariant-relations route") {
    // ok implies (m, Y) |= tau for every parameter-free definable Y
    Scheme ind = build_ind();
    FiniteStructure m = corpus::cycle(3, true);
    auto report = strong_model_check(m, std::nullopt, ind);
    REQUIRE(report.ok);
    for (const auto& member : invariant_relations(m, 1)) {
        std::set<int> y;
        for (const auto& t : member) y.insert(t[0]);
        EvalOptions opts;
        opts.p_extension = &y;
        CHECK(eval(m, ind.body, {}, opts));
    }
}
