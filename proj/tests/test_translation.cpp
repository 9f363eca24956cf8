#include <catch2/catch_amalgamated.hpp>

#include "wb/corpus.hpp"
#include "wb/model.hpp"
#include "wb/syntax.hpp"
#include "wb/translation.hpp"

using namespace wb;

namespace {

Signature leq_sig() { return corpus::order_signature(); }

} // namespace

TEST_CASE("translation construction validates components") {
    Signature sig = leq_sig();
    // missing relation formula
    CHECK_THROWS_AS(Translation(sig, sig, 1, eq("x1", "x1"), eq("x1_1", "x2_1"), {}), Error);
    // stray free variable in delta
    CHECK_THROWS_AS(Translation(sig, sig, 1, eq("x1", "z"), eq("x1_1", "x2_1"),
                                {{"Leq", atom("Leq", {"v1_1", "v2_1"})}}),
                    Error);
    CHECK_NOTHROW(identity_translation(sig));
}

namespace {

// rewrite universals as not-exists-not, the normal form apply() emits
Formula to_exists_fragment(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Atom:
        case FormulaKind::Eq:
            return f;
        case FormulaKind::Not: return lnot(to_exists_fragment(f.child()));
        case FormulaKind::And:
            return land(to_exists_fragment(f.left()), to_exists_fragment(f.right()));
        case FormulaKind::Or:
            return lor(to_exists_fragment(f.left()), to_exists_fragment(f.right()));
        case FormulaKind::Implies:
            return implies(to_exists_fragment(f.left()), to_exists_fragment(f.right()));
        case FormulaKind::Iff:
            return iff(to_exists_fragment(f.left()), to_exists_fragment(f.right()));
        case FormulaKind::Exists:
            return exists(f.bound_var(), to_exists_fragment(f.child()));
        case FormulaKind::Forall:
            return lnot(exists(f.bound_var(), lnot(to_exists_fragment(f.child()))));
    }
    return f;
}

} // namespace

TEST_CASE("apply with the identity translation is alpha-identity") {
    Translation id = identity_translation(leq_sig());
    corpus::Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        // exists-fragment formulas come back alpha-equal ...
        Formula f = to_exists_fragment(corpus::random_sentence(rng, leq_sig(), 3));
        CHECK(alpha_equal(apply(id, f), f));
    }
    // ... and universals only up to the not-exists-not normal form
    Formula univ = parse("all x. Leq(x,x)", leq_sig());
    CHECK(alpha_equal(apply(id, univ), parse("~(ex x. ~Leq(x,x))", leq_sig())));
}

TEST_CASE("apply rejects P") {
    Translation id = identity_translation(leq_sig());
    Formula f = parse("all x. P(x)", leq_sig(), true);
    try {
        apply(id, f);
        FAIL("expected SignatureMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SignatureMismatch);
    }
}

TEST_CASE("reversal translation turns least into greatest") {
    Translation rev = corpus::reversal_translation();
    FiniteStructure three = corpus::chain(3);
    Formula least = parse("ex x. all y. Leq(x,y)", leq_sig());
    Formula translated = apply(rev, least);
    CHECK(eval(three, translated) == eval(three, parse("ex x. all y. Leq(y,x)", leq_sig())));
    // translation lemma instance: internal model and base evaluation agree
    CHECK(eval(three, translated) == internal_model(three, rev).satisfies(least));
}

TEST_CASE("compose with identity is the other argument, componentwise") {
    Translation id = identity_translation(leq_sig());
    Translation rev = corpus::reversal_translation();
    Translation c = compose(id, rev);
    CHECK(c.dim() == 1);
    CHECK(alpha_equal(c.eta(), rev.eta()));
    CHECK(alpha_equal(c.rel_formula("Leq"), rev.rel_formula("Leq")));
    FiniteStructure m = corpus::chain(3);
    CHECK(internal_model(m, c).structure.size() == 3);
}

TEST_CASE("reversal composed with reversal is the identity on the 3-chain") {
    Translation rev = corpus::reversal_translation();
    Translation twice = compose(rev, rev);
    FiniteStructure three = corpus::chain(3);
    InternalModel im = internal_model(three, twice);
    REQUIRE(im.structure.size() == 3);
    // not merely isomorphic: the double reversal preserves the order itself
    CHECK(im.structure.relation("Leq") == three.relation("Leq"));
}

TEST_CASE("compose dimension bookkeeping") {
    Translation lex = corpus::lex_pair_translation();
    Translation rev = corpus::reversal_translation();
    CHECK(compose(lex, rev).dim() == 2);
    CHECK(compose(rev, lex).dim() == 2);
    CHECK(compose(lex, lex).dim() == 4);
    CHECK(flags(compose(lex, rev)).dimension == flags(lex).dimension * flags(rev).dimension);
}

TEST_CASE("flags") {
    TranslationFlags id_flags = flags(identity_translation(leq_sig()));
    CHECK(id_flags.dimension == 1);
    CHECK(id_flags.unrelativized);
    CHECK(id_flags.identity_preserving);
    CHECK(id_flags.direct);

    TranslationFlags rev_flags = flags(corpus::reversal_translation());
    CHECK(rev_flags.direct);  // reversal relativizes nothing and keeps equality

    TranslationFlags lex_flags = flags(corpus::lex_pair_translation());
    CHECK(lex_flags.dimension == 2);
    CHECK(lex_flags.unrelativized);
    CHECK(lex_flags.identity_preserving);
    CHECK(!lex_flags.direct);

    Signature sig = leq_sig();
    Translation relativized(sig, sig, 1, atom("Leq", {"x1", "x1"}), eq("x1_1", "x2_1"),
                            {{"Leq", atom("Leq", {"v1_1", "v2_1"})}});
    CHECK(!flags(relativized).unrelativized);
    CHECK(!flags(relativized).direct);
}

TEST_CASE("iso_conditions") {
    Signature sig = leq_sig();
    Translation id = identity_translation(sig);
    Translation rev = corpus::reversal_translation();
    FiniteStructure three = corpus::chain(3);

    SECTION("identity against itself via the diagonal") {
        auto conds = iso_conditions(id, id, eq("x1", "x1s"));
        REQUIRE(conds.size() == 5);
        for (const auto& c : conds) {
            CHECK(free_vars(c).empty());
            CHECK(eval(three, c));
        }
        corpus::Rng rng(8);
        FiniteStructure random = corpus::random_structure(rng, sig, 4);
        for (const auto& c : conds) CHECK(eval(random, c));
    }
    SECTION("diagonal does not link identity with reversal") {
        auto conds = iso_conditions(id, rev, eq("x1", "x1s"));
        CHECK(!eval(three, conds[4]));  // relation preservation fails
        for (int i = 0; i < 4; ++i) CHECK(eval(three, conds[static_cast<std::size_t>(i)]));
    }
    SECTION("the order-reversing pairing links them") {
        Formula bot1 = forall("z", atom("Leq", {"x1", "z"}));
        Formula top1 = forall("z", atom("Leq", {"z", "x1"}));
        Formula bot2 = forall("z", atom("Leq", {"x1s", "z"}));
        Formula top2 = forall("z", atom("Leq", {"z", "x1s"}));
        Formula mid1 = land(lnot(bot1), lnot(top1));
        Formula mid2 = land(lnot(bot2), lnot(top2));
        Formula iota = lor(land(bot1, top2), lor(land(top1, bot2), land(mid1, mid2)));
        auto conds = iso_conditions(id, rev, iota);
        for (const auto& c : conds) CHECK(eval(three, c));
    }
    SECTION("arity checking on iota") {
        CHECK_THROWS_AS(iso_conditions(id, id, eq("x1", "y9")), Error);
    }
}

TEST_CASE("validate_on_model") {
    Signature sig = leq_sig();
    SECTION("identity is clean everywhere") {
        Translation id = identity_translation(sig);
        corpus::Rng rng(17);
        for (int i = 0; i < 10; ++i) {
            FiniteStructure m = corpus::random_structure(rng, sig, 1 + rng.below(4));
            CHECK(validate_on_model(id, m).clean());
        }
    }
    SECTION("total eta with a non-invariant relation is a congruence violation") {
        Signature csig({{"C", 1}});
        Translation t(csig, csig, 1, eq("x1", "x1"), eq("x1_1", "x1_1"),
                      {{"C", atom("C", {"v1_1"})}});
        FiniteStructure m(csig, {"a", "b"}, {{"C", TupleSet{{0}}}});
        auto report = validate_on_model(t, m);
        CHECK(!report.clean());
        bool found = false;
        for (const auto& v : report.violations)
            if (v.find("not eta-invariant") != std::string::npos) found = true;
        CHECK(found);
    }
    SECTION("empty domain is a warning, not a violation") {
        Translation empty_dom(sig, sig, 1, lnot(eq("x1", "x1")), lnot(eq("x1_1", "x1_1")),
                              {{"Leq", lnot(eq("v1_1", "v1_1"))}});
        auto report = validate_on_model(empty_dom, corpus::chain(2));
        CHECK(report.clean());
        REQUIRE(!report.warnings.empty());
        CHECK(report.warnings[0].find("empty") != std::string::npos);
        CHECK_THROWS_AS(internal_model(corpus::chain(2), empty_dom), Error);
    }
}

TEST_CASE("translation lemma holds across the fixture pool") {
    corpus::SuiteResult r = corpus::translation_lemma_suite(123, 40);
    CHECK(r.failures == 0);
}

TEST_CASE("composition coherence smoke") {
    corpus::SuiteResult r = corpus::composition_suite(123, 20);
    CHECK(r.failures == 0);
}
