#include <catch2/catch_amalgamated.hpp>

#include "wb/corpus.hpp"

using namespace wb;

TEST_CASE("rank-agreement oracle sanity") {
    // chains 3 and 4: equivalent at rank 2, separated at rank 3
    CHECK(corpus::oracle::agree_up_to_rank(corpus::chain(3), corpus::chain(4), 2));
    CHECK(!corpus::oracle::agree_up_to_rank(corpus::chain(3), corpus::chain(4), 3));
    CHECK(corpus::oracle::agree_up_to_rank(corpus::chain(3), corpus::chain(3), 3));
    // without constants there are no atomic sentences, so everything agrees
    // at rank 0; one quantifier separates a self-loop from its absence
    Signature sig({{"R", 2}});
    FiniteStructure loop(sig, {"e0"}, {{"R", TupleSet{{0, 0}}}});
    FiniteStructure no_loop(sig, {"e0"}, {});
    CHECK(corpus::oracle::agree_up_to_rank(loop, no_loop, 0));
    CHECK(!corpus::oracle::agree_up_to_rank(loop, no_loop, 1));
}

TEST_CASE("definable-subsets oracle sanity") {
    // on the rigid 3-chain every subset is definable
    auto chain_subsets = corpus::oracle::definable_subsets(corpus::chain(3), 3);
    CHECK(chain_subsets.size() == 8);
    // on a pure 2-set only the trivial subsets are
    FiniteStructure two(Signature(), {"a", "b"}, {});
    auto two_subsets = corpus::oracle::definable_subsets(two, 2);
    CHECK(two_subsets == std::set<std::set<int>>{{}, {0, 1}});
}

TEST_CASE("suites pass at reduced size") {
    CHECK(corpus::translation_lemma_suite(7, 25).failures == 0);
    CHECK(corpus::composition_suite(7, 10).failures == 0);
    CHECK(corpus::ef_bridge_suite(7, 8, 3, 2).failures == 0);
    CHECK(corpus::linear_order_suite(6, 3).failures == 0);
    CHECK(corpus::definability_suite(7, 8).failures == 0);
    CHECK(corpus::quotient_suite(7, 25).failures == 0);
}

TEST_CASE("suites are deterministic given the seed") {
    auto a = corpus::translation_lemma_suite(99, 10);
    auto b = corpus::translation_lemma_suite(99, 10);
    CHECK(a.cases == b.cases);
    CHECK(a.failures == b.failures);
    CHECK(a.messages == b.messages);
}

TEST_CASE("parallel execution does not change results") {
    auto serial = corpus::quotient_suite(13, 30, 1);
    auto parallel = corpus::quotient_suite(13, 30, 4);
    CHECK(serial.failures == parallel.failures);
    CHECK(serial.cases == parallel.cases);
}

TEST_CASE("corpus runner honors the configuration") {
    corpus::CorpusConfig config;
    config.suites = {"linear-order-law", "quotient-soundness"};
    config.cases["quotient-soundness"] = 10;
    auto results = corpus::run_corpus(config);
    REQUIRE(results.size() == 2);
    CHECK(results[0].name == "linear-order-law");
    CHECK(results[1].cases == 10);
    CHECK_THROWS_AS(corpus::run_corpus({0, 1, {"bogus"}, {}}), Error);
}
