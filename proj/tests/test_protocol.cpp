#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "leadel/exact.hpp"
#include "leadel/protocol.hpp"

using namespace leadel;

TEST_CASE("round feedback from flip patterns") {
    const std::vector<uint32_t> one = {7};
    const RoundOutcome succ = run_round(one, std::vector<uint8_t>{1});
    CHECK(succ.feedback == Feedback::Success);
    CHECK(succ.transmitters == std::vector<uint32_t>{7});

    const std::vector<uint32_t> two = {0, 1};
    CHECK(run_round(two, {1, 1}).feedback == Feedback::Collision);
    CHECK(run_round(two, {1, 0}).feedback == Feedback::Success);
    CHECK(run_round(two, {0, 1}).feedback == Feedback::Success);
    CHECK(run_round(two, {0, 0}).feedback == Feedback::Silence);
    const RoundOutcome coll = run_round(two, {1, 1});
    CHECK(coll.transmitters.size() == 2);
    CHECK(coll.silent.empty());

    CHECK_THROWS_AS(run_round({}, std::vector<uint8_t>{}), std::invalid_argument);
    CHECK_THROWS_AS(run_round(two, std::vector<uint8_t>{1}), std::invalid_argument);
}

TEST_CASE("scripted replay of the four-station election") {
    // flips: (A,B,C,D) = 1110 -> collision; ABC = 000 -> silence; 100 -> A wins
    const ElectionTrace t = run_election_scripted(4, {{1, 1, 1, 0}, {0, 0, 0}, {1, 0, 0}});
    REQUIRE(t.leader.has_value());
    CHECK(*t.leader == 0);
    CHECK(t.coin_flip_rounds == 3);
    CHECK(t.time_units == 4);
    REQUIRE(t.rounds.size() == 4);

    // time unit 1: deterministic initialization, everybody sends
    CHECK(t.rounds[0].active == std::vector<uint32_t>{0, 1, 2, 3});
    CHECK(t.rounds[0].feedback == Feedback::Collision);
    // time unit 2: D flips 0 and is the only non-active
    CHECK(t.rounds[1].active == std::vector<uint32_t>{0, 1, 2});
    CHECK(t.rounds[1].non_active == std::vector<uint32_t>{3});
    CHECK(t.rounds[1].eliminated.empty());
    CHECK(t.rounds[1].feedback == Feedback::Collision);
    // time unit 3: silence among A,B,C; D now eliminated
    CHECK(t.rounds[2].active.empty());
    CHECK(t.rounds[2].non_active == std::vector<uint32_t>{0, 1, 2});
    CHECK(t.rounds[2].eliminated == std::vector<uint32_t>{3});
    CHECK(t.rounds[2].feedback == Feedback::Silence);
    // time unit 4: A transmits alone
    CHECK(t.rounds[3].active == std::vector<uint32_t>{0});
    CHECK(t.rounds[3].non_active == std::vector<uint32_t>{1, 2});
    CHECK(t.rounds[3].eliminated == std::vector<uint32_t>{3});
    CHECK(t.rounds[3].feedback == Feedback::Success);

    const std::string json = trace_to_json(t, 0.5, std::nullopt);
    CHECK(json.find("\"schema\": 1") != std::string::npos);
    CHECK(json.find("\"time_units\": 4") != std::string::npos);
    CHECK(json.find("\"leader\": 0") != std::string::npos);
}

TEST_CASE("script validation") {
    CHECK_THROWS_AS(run_election_scripted(4, {{1, 1, 1, 0}, {0, 0, 0}}), std::invalid_argument);  // runs out
    CHECK_THROWS_AS(run_election_scripted(4, {{1, 1, 1}}), std::invalid_argument);                // short round
    CHECK_THROWS_AS(run_election_scripted(4, {{1, 1, 1, 0}, {0, 0, 0}, {1, 0, 0}, {1, 1}}),
                    std::invalid_argument);  // continues past the election

    // surplus flips within a round are ignored (flips bind to candidates in
    // station-id order)
    const ElectionTrace t = run_election_scripted(4, {{1, 1, 1, 0}, {0, 0, 0}, {1, 0, 0, 0}});
    REQUIRE(t.leader.has_value());
    CHECK(*t.leader == 0);
    CHECK(t.time_units == 4);
}

TEST_CASE("boundary populations") {
    const SplitParams par(0.5);
    Rng rng(3);
    const ElectionTrace t1 = run_election(1, par, rng);
    REQUIRE(t1.leader.has_value());
    CHECK(*t1.leader == 0);
    CHECK(t1.coin_flip_rounds == 0);
    CHECK(t1.time_units == 1);

    const ElectionTrace t0 = run_election(0, par, rng);
    CHECK(!t0.leader.has_value());
    CHECK(t0.coin_flip_rounds == 0);
    CHECK(t0.time_units == 1);
    CHECK(run_election_cost(1, par, rng).coin_flip_rounds == 0);
}

TEST_CASE("trace and cost paths consume the stream identically") {
    const SplitParams par(0.35);
    for (uint64_t seed = 0; seed < 50; ++seed) {
        Rng a(seed), b(seed);
        const ElectionTrace t = run_election(9, par, a);
        const ElectionCost c = run_election_cost(9, par, b);
        CHECK(t.coin_flip_rounds == c.coin_flip_rounds);
    }
}

TEST_CASE("election invariants over random runs") {
    const SplitParams par(0.5);
    Rng rng(4);
    for (int rep = 0; rep < 300; ++rep) {
        const ElectionTrace t = run_election(7, par, rng);
        REQUIRE(t.leader.has_value());
        size_t prev_candidates = 7;
        std::vector<uint32_t> prev_eliminated;
        for (size_t i = 1; i < t.rounds.size(); ++i) {
            const Round& r = t.rounds[i];
            // the three sets partition the station set
            std::set<uint32_t> all;
            for (uint32_t s : r.active) all.insert(s);
            for (uint32_t s : r.non_active) all.insert(s);
            for (uint32_t s : r.eliminated) all.insert(s);
            CHECK(all.size() == 7);
            // candidate count never grows
            const size_t candidates = r.active.size() + r.non_active.size();
            CHECK(candidates <= prev_candidates);
            // eliminations happen exactly after a collision and hit the 0-flippers
            const Round& prev = t.rounds[i - 1];
            // eliminated is absorbing
            CHECK(std::includes(r.eliminated.begin(), r.eliminated.end(), prev_eliminated.begin(),
                                prev_eliminated.end()));
            std::vector<uint32_t> newly;
            std::set_difference(r.eliminated.begin(), r.eliminated.end(), prev_eliminated.begin(),
                                prev_eliminated.end(), std::back_inserter(newly));
            if (!newly.empty()) {
                CHECK(prev.feedback == Feedback::Collision);
                CHECK(std::includes(prev.non_active.begin(), prev.non_active.end(), newly.begin(), newly.end()));
                CHECK(candidates < prev_candidates);
            }
            prev_candidates = candidates;
            prev_eliminated = r.eliminated;
        }
        CHECK(t.rounds.back().feedback == Feedback::Success);
    }
}

TEST_CASE("mean rounds for two stations match the closed form") {
    // E(H_2) = 1/(2pq): 2.0 at p = 0.5, 3.125 at p = 0.2
    for (const auto& [p, expect] : std::vector<std::pair<double, double>>{{0.5, 2.0}, {0.2, 3.125}}) {
        const SplitParams par(p);
        const int n = 1000000;
        double sum = 0, sq = 0;
        for (int t = 0; t < n; ++t) {
            Rng rng = Rng::for_trial(777, uint64_t(t));
            const auto c = run_election_cost(2, par, rng);
            REQUIRE(!c.truncated);
            sum += double(c.coin_flip_rounds);
            sq += double(c.coin_flip_rounds) * double(c.coin_flip_rounds);
        }
        const double mean = sum / n;
        const double se = std::sqrt((sq / n - mean * mean) / (n - 1));
        CHECK(std::abs(mean - expect) <= 3 * se);
    }
}

TEST_CASE("simulated cost distribution matches the DP cdf (KS at 1%)") {
    const int trials = 100000;
    // conservative KS critical value at the 1% level; the discrete statistic
    // stochastically undershoots the continuous one
    const double crit = 1.628 / std::sqrt(double(trials));
    for (double p : {0.3, 0.5, 0.7}) {
        const SplitParams par(p);
        for (uint32_t n = 2; n <= 12; ++n) {
            std::vector<int64_t> counts(400, 0);
            for (int t = 0; t < trials; ++t) {
                Rng rng = Rng::for_trial(0x5eed + n, uint64_t(t) * 3 + uint64_t(p * 10));
                const auto c = run_election_cost(n, par, rng);
                REQUIRE(!c.truncated);
                ++counts[std::min<uint64_t>(c.coin_flip_rounds, counts.size() - 1)];
            }
            double cum = 0.0, ks = 0.0;
            for (size_t k = 0; k < counts.size(); ++k) {
                cum += double(counts[k]) / trials;
                ks = std::max(ks, std::abs(cum - exact_cdf_dp(n, int64_t(k), par)));
            }
            CHECK(ks < crit);
        }
    }
}
