#include <doctest.h>

#include <vector>

#include "icm/model.hpp"
#include "icm/monte_carlo.hpp"
#include "oracles.hpp"

using namespace icm;

TEST_SUITE("model") {
    TEST_CASE("normalize_stacks examples") {
        std::vector<Chips> one{100};
        CHECK(normalize_stacks(one).fractions() == std::vector<double>{1.0});

        std::vector<Chips> even{50, 50};
        CHECK(normalize_stacks(even).fractions() == std::vector<double>{0.5, 0.5});

        std::vector<Chips> three{50, 30, 20};
        const auto s = normalize_stacks(three);
        REQUIRE(s.player_count() == 3);
        CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(s[1] == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(s[2] == doctest::Approx(0.2).epsilon(1e-15));
    }

    TEST_CASE("normalize_stacks rejects empty and non-positive input") {
        std::vector<Chips> empty;
        CHECK_THROWS_AS(normalize_stacks(empty), InvariantError);
        std::vector<Chips> zero{10, 0, 5};
        CHECK_THROWS_AS(normalize_stacks(zero), InvariantError);
        std::vector<Chips> negative{10, -3};
        CHECK_THROWS_AS(normalize_stacks(negative), InvariantError);
    }

    TEST_CASE("normalize_stacks is scale invariant") {
        CounterRng rng(7, 0);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 1 + trial % 12;
            auto chips = oracle::random_chips(rng, n);
            const Chips factor = 1 + static_cast<Chips>(rng.uniform() * 1000);
            auto scaled = chips;
            for (auto& c : scaled) c *= factor;
            const auto a = normalize_stacks(chips);
            const auto b = normalize_stacks(scaled);
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
        }
    }

    TEST_CASE("StackDistribution validates shares") {
        CHECK_THROWS_AS(StackDistribution({0.5, 0.4}), InvariantError);
        CHECK_THROWS_AS(StackDistribution({1.0, 0.0}), InvariantError);
        CHECK_THROWS_AS(StackDistribution({}), InvariantError);
        CHECK_NOTHROW(StackDistribution({0.25, 0.75}));
    }

    TEST_CASE("normalize_payouts examples") {
        std::vector<double> p{500, 300, 200};
        CHECK(normalize_payouts(p, 3).prizes() == std::vector<double>{0.5, 0.3, 0.2});

        std::vector<double> p4{500, 300, 200, 100};
        const auto top2 = normalize_payouts(p4, 2);
        CHECK(top2.prizes() == std::vector<double>{0.625, 0.375});

        std::vector<double> wta{100};
        CHECK(normalize_payouts(wta, 3).prizes() == std::vector<double>{1.0, 0.0, 0.0});
    }

    TEST_CASE("normalize_payouts errors") {
        std::vector<double> zeros{0, 0, 5};
        CHECK_THROWS_AS(normalize_payouts(zeros, 2), InvariantError);
        std::vector<double> none;
        CHECK_THROWS_AS(normalize_payouts(none, 2), InvariantError);
        std::vector<double> p{1};
        CHECK_THROWS_AS(normalize_payouts(p, 0), InvariantError);
        std::vector<double> negative{1, -1};
        CHECK_THROWS_AS(normalize_payouts(negative, 2), InvariantError);
    }

    TEST_CASE("non-monotone ladders are accepted with a warning") {
        const PayoutLadder odd({0.3, 0.5, 0.2}, true);
        CHECK_FALSE(odd.monotone());
        REQUIRE(odd.warnings().size() == 1);
        const PayoutLadder fine({0.5, 0.3, 0.2}, true);
        CHECK(fine.monotone());
        CHECK(fine.warnings().empty());
        CHECK_THROWS_AS(PayoutLadder({0.5, 0.3}, true), InvariantError);
        CHECK_NOTHROW(PayoutLadder({500, 300}, false));
    }

    TEST_CASE("FinishMatrix requires a doubly stochastic matrix") {
        CHECK_NOTHROW(FinishMatrix(2, {0.7, 0.3, 0.3, 0.7}));
        CHECK_THROWS_AS(FinishMatrix(2, {0.7, 0.3, 0.4, 0.6}), InvariantError);  // columns
        CHECK_THROWS_AS(FinishMatrix(2, {0.5, 0.5, 0.5}), InvariantError);
        CHECK_THROWS_AS(FinishMatrix(0, {}), InvariantError);
    }

    TEST_CASE("EquityVector conservation and bounds") {
        const PayoutLadder ladder({0.6, 0.4}, true);
        CHECK_NOTHROW(EquityVector({0.5, 0.5}, std::nullopt, ladder));
        CHECK_THROWS_AS(EquityVector({0.6, 0.5}, std::nullopt, ladder), InvariantError);
        CHECK_THROWS_AS(EquityVector({0.7, 0.3 + 0.0}, std::nullopt, PayoutLadder({0.6, 0.4}, true)), InvariantError);
        // Sampled estimates get 4 * sum(SE) of slack.
        CHECK_NOTHROW(EquityVector({0.51, 0.5}, std::vector<double>{0.002, 0.002}, ladder));
        CHECK_THROWS_AS(EquityVector({0.51, 0.5}, std::vector<double>{0.001, 0.001}, ladder), InvariantError);
        CHECK_THROWS_AS(EquityVector({0.5, 0.5}, std::vector<double>{-0.1, 0.1}, ladder), InvariantError);
    }

    TEST_CASE("SnapshotRecord invariants") {
        using P = SnapshotPlayer;
        CHECK_THROWS_AS(SnapshotRecord("e", "d", {P{"a", 10}}, {1.0}), InvariantError);
        CHECK_THROWS_AS(SnapshotRecord("e", "d", {P{"a", 10}, P{"b", 0}}, {0.5, 0.5}), InvariantError);
        CHECK_THROWS_AS(SnapshotRecord("e", "d", {P{"a", 10}, P{"b", 5}}, {0.5, 0.4}), InvariantError);
        CHECK_THROWS_AS(SnapshotRecord("e", "d", {P{"a", 10}, P{"b", 5}}, {0.6, 0.4}, {1, 1}), InvariantError);
        const SnapshotRecord ok("e", "d", {P{"a", 10}, P{"b", 5}}, {0.4, 0.6}, {2, 1});
        CHECK(ok.ladder().prizes() == std::vector<double>{0.6, 0.4});
        CHECK(ok.chips() == std::vector<Chips>{10, 5});
    }

    TEST_CASE("SnapshotRecord ladder keeps non-monotone prize order when places are known") {
        using P = SnapshotPlayer;
        const SnapshotRecord snap("e", "d", {P{"a", 1}, P{"b", 2}, P{"c", 3}}, {0.2, 0.3, 0.5}, {3, 1, 2});
        CHECK(snap.ladder().prizes() == std::vector<double>{0.3, 0.5, 0.2});
        const SnapshotRecord unknown("e", "d", {P{"a", 1}, P{"b", 2}, P{"c", 3}}, {0.2, 0.3, 0.5});
        CHECK(unknown.ladder().prizes() == std::vector<double>{0.5, 0.3, 0.2});
    }
}
