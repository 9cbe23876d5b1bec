#include <cmath>

#include "doctest.h"
#include "leadel/exact.hpp"
#include "leadel/protocol.hpp"

using namespace leadel;

TEST_CASE("mean table boundary and hand values") {
    const SplitParams half(0.5);
    const MeanTable t = exact_mean_table(10, half);
    CHECK(t.values[0] == 0.0);
    CHECK(t.values[1] == 0.0);
    CHECK(t.values[2] == doctest::Approx(2.0).epsilon(1e-12));        // 1/(2pq)
    CHECK(t.values[3] == doctest::Approx(7.0 / 3.0).epsilon(1e-12));  // (1 + 3 p^2 q E(H_2)) / (1 - p^3 - q^3)

    const MeanTable t2 = exact_mean_table(4, SplitParams(0.2));
    CHECK(t2.values[2] == doctest::Approx(3.125).epsilon(1e-12));  // 1/(2 * 0.2 * 0.8)
}

TEST_CASE("means exceed 1 and are eventually nondecreasing") {
    // a biased split can speed the election up at small n: at p = 0.2,
    // E(H_3) = 1.3/0.48 < E(H_2) = 3.125, so monotonicity only holds past a
    // p-dependent dip (ends by n = 4 for p >= 0.2, later for smaller p)
    const MeanTable dip = exact_mean_table(4, SplitParams(0.2));
    CHECK(dip.values[3] == doctest::Approx(1.3 / 0.48).epsilon(1e-12));
    CHECK(dip.values[3] < dip.values[2]);
    for (double p : {0.2, 0.5, 0.8}) {
        const MeanTable t = exact_mean_table(300, SplitParams(p));
        for (uint64_t n = 2; n <= 300; ++n) CHECK(t.values[n] >= 1.0);
        for (uint64_t n = 9; n <= 300; ++n) CHECK(t.values[n] >= t.values[n - 1] - 1e-12);
    }
}

TEST_CASE("mean superbound used by the series tail: E(H_m) <= E(H_2) m") {
    for (double p : {0.2, 0.5, 0.8, 0.95}) {
        const MeanTable t = exact_mean_table(400, SplitParams(p));
        for (uint64_t m = 2; m <= 400; ++m) CHECK(t.values[m] <= t.values[2] * double(m));
    }
}

TEST_CASE("asymmetry is real away from p = 1/2") {
    const MeanTable a = exact_mean_table(20, SplitParams(0.3));
    const MeanTable b = exact_mean_table(20, SplitParams(0.7));
    CHECK(a.values[2] == doctest::Approx(b.values[2]).epsilon(1e-12));  // 1/(2pq) is symmetric
    CHECK(std::abs(a.values[3] - b.values[3]) > 0.1);
}

TEST_CASE("dp cdf hand values") {
    const SplitParams half(0.5);
    CHECK(exact_cdf_dp(2, 1, half) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(exact_cdf_dp(2, 2, half) == doctest::Approx(0.75).epsilon(1e-12));
    for (uint32_t n = 2; n <= 8; ++n) CHECK(exact_cdf_dp(n, 0, half) == 0.0);
    CHECK(exact_cdf_dp(0, 5, half) == 1.0);
    CHECK(exact_cdf_dp(1, 0, half) == 1.0);
    CHECK(exact_cdf_dp(3, -1, half) == 0.0);
}

TEST_CASE("dp cdf is nondecreasing in k and approaches 1") {
    for (double p : {0.2, 0.5, 0.8}) {
        const SplitParams par(p);
        for (uint32_t n : {2u, 5u, 17u}) {
            double prev = 0.0;
            for (int64_t k = 0; k <= 200; ++k) {
                const double v = exact_cdf_dp(n, k, par);
                CHECK(v >= prev - 1e-15);
                prev = v;
            }
            CHECK(1.0 - prev <= 1e-12);
        }
    }
}

TEST_CASE("tail-sum identity ties the dp to the mean table") {
    for (double p : {0.2, 0.5, 0.8}) {
        const SplitParams par(p);
        const MeanTable& t = cached_mean_table(50, par);
        for (uint32_t n = 2; n <= 50; ++n) {
            double sum = 0.0;
            for (int64_t k = 0; k < 100000; ++k) {
                const double tail = 1.0 - exact_cdf_dp(n, k, par);
                sum += tail;
                if (tail <= 1e-12 && k > 1) break;
            }
            CHECK(std::abs(sum - t.values[n]) <= 1e-9);
        }
    }
}

TEST_CASE("poisson transform series basics") {
    const SplitParams half(0.5);
    CHECK(poisson_transform_series(0.0, half) == 0.0);
    // leading term E(H_2) x^2/2 e^{-x}; the relative gap is E(H_3)/(3 E(H_2)) x + O(x^2)
    const double x = 1e-4;
    const double lead = 2.0 * x * x / 2.0 * std::exp(-x);
    const double ratio = poisson_transform_series(x, half) / lead;
    CHECK(std::abs(ratio - 1.0) <= 1e-4);
    const double x2 = 1e-3;
    const double lead2 = 2.0 * x2 * x2 / 2.0 * std::exp(-x2);
    const double ratio2 = poisson_transform_series(x2, half) / lead2;
    // next-order coefficient: (ratio - 1)/x -> E(H_3)/(3 E(H_2)) = 7/18
    CHECK((ratio2 - 1.0) / x2 == doctest::Approx(7.0 / 18.0).epsilon(0.05));
}

TEST_CASE("series equals fixpoint route") {
    CHECK(std::abs(poisson_transform_series(1.0, SplitParams(0.3)) - poisson_transform_fixpoint(1.0, SplitParams(0.3))) <=
          1e-8);
    CHECK(std::abs(poisson_transform_series(10.0, SplitParams(0.7)) -
                   poisson_transform_fixpoint(10.0, SplitParams(0.7))) <= 1e-8);
    CHECK(std::abs(poisson_transform_series(5.0, SplitParams(0.5)) - poisson_transform_fixpoint(5.0, SplitParams(0.5))) <=
          1e-8);
}

TEST_CASE("fixpoint is independent of the base threshold and vanishes at 0") {
    const SplitParams par(0.4);
    const double a = poisson_transform_fixpoint(7.0, par, 256, 0.5);
    const double b = poisson_transform_fixpoint(7.0, par, 256, 0.2);
    CHECK(std::abs(a - b) <= 1e-10);
    CHECK(poisson_transform_fixpoint(0.0, par) == 0.0);  // forcing term 1-(1+x)e^{-x} is 0 at 0
}

TEST_CASE("fixpoint reports depth exhaustion") {
    CHECK_THROWS_AS(poisson_transform_fixpoint(10.0, SplitParams(0.7), 3), NumericalError);
}

TEST_CASE("transform matches a simulated Poisson population") {
    // sample N ~ Poisson(x), run the election, average the rounds; this ties
    // the protocol simulator to the series route through a fourth path
    const SplitParams par(0.4);
    const double x = 6.0;
    const double expect = poisson_transform_series(x, par);
    double sum = 0, sq = 0;
    const int trials = 400000;
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::for_trial(0x90, uint64_t(t));
        // Knuth's product method is fine at this intensity
        uint32_t n = 0;
        double prod = rng.uniform_pos();
        const double floor_p = std::exp(-x);
        while (prod > floor_p) {
            ++n;
            prod *= rng.uniform_pos();
        }
        const auto c = leadel::run_election_cost(n, par, rng);
        REQUIRE(!c.truncated);
        sum += double(c.coin_flip_rounds);
        sq += double(c.coin_flip_rounds) * double(c.coin_flip_rounds);
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sq / trials - mean * mean) / (trials - 1));
    CHECK(std::abs(mean - expect) <= 3 * se);
}

TEST_CASE("high-n means stay close to the direct small-n recurrence") {
    // the windowed log-space rows (n > 50) must join smoothly with the full
    // rows (n <= 50): compare a table built entirely through the generic path
    const SplitParams par(0.3);
    const MeanTable t = exact_mean_table(120, par);
    for (uint64_t n = 49; n <= 52; ++n) CHECK(t.values[n] < t.values[n + 1] + 1e-12);
    // sanity: the mean grows like -log_p n
    const double slope = (t.values[120] - t.values[60]) / (std::log(120.0 / 60.0) / -std::log(0.3));
    CHECK(slope == doctest::Approx(1.0).epsilon(0.2));
}
