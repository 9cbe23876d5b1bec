#include <cmath>

#include "doctest.h"
#include "leadel/exact.hpp"
#include "leadel/intervals.hpp"

using namespace leadel;

TEST_CASE("first split and the hand-built level 2") {
    const SplitParams par(0.3);
    const IntervalDecomposition k1 = build_intervals(1, par);
    REQUIRE(k1.lengths.size() == 2);
    CHECK(k1.lengths[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(k1.lengths[1] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(k1.rights[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(k1.rights[1] == 1.0);

    const IntervalDecomposition k2 = build_intervals(2, par);
    const double expect_len[4] = {0.09, 0.21, 0.21, 0.49};
    const double expect_right[4] = {0.09, 0.30, 0.51, 1.0};
    for (int j = 0; j < 4; ++j) {
        CHECK(k2.lengths[j] == doctest::Approx(expect_len[j]).epsilon(1e-14));
        CHECK(k2.rights[j] == doctest::Approx(expect_right[j]).epsilon(1e-14));
    }
}

TEST_CASE("lengths sum to 1 and rights increase strictly") {
    for (double p : {0.2, 0.5, 0.8}) {
        const SplitParams par(p);
        for (uint32_t k : {1u, 5u, 10u}) {
            const IntervalDecomposition d = build_intervals(k, par);
            double sum = 0.0;
            for (double l : d.lengths) {
                CHECK(l > 0.0);
                sum += l;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
            for (size_t j = 1; j < d.rights.size(); ++j) CHECK(d.rights[j] > d.rights[j - 1]);
            CHECK(d.rights.back() == 1.0);
        }
    }
}

TEST_CASE("stage recursion and digit products agree with the scan") {
    const SplitParams par(0.37);
    IntervalDecomposition stage = build_intervals(0, par);
    CHECK(stage.lengths == std::vector<double>{1.0});
    CHECK(stage.rights == std::vector<double>{1.0});
    for (uint32_t k = 1; k <= 10; ++k) {
        stage = refine_intervals(stage, par);
        const IntervalDecomposition direct = build_intervals(k, par);
        REQUIRE(stage.lengths.size() == direct.lengths.size());
        for (size_t j = 0; j < stage.lengths.size(); ++j) {
            CHECK(stage.lengths[j] == doctest::Approx(direct.lengths[j]).epsilon(1e-12));
            CHECK(stage.rights[j] == doctest::Approx(direct.rights[j]).epsilon(1e-12));
            CHECK(interval_length_by_digits(k, j, par) == doctest::Approx(direct.lengths[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("refinement splits each interval in ratio p:q") {
    const SplitParams par(0.3);
    const IntervalDecomposition parent = build_intervals(6, par);
    const IntervalDecomposition child = refine_intervals(parent, par);
    for (size_t j = 0; j < parent.lengths.size(); ++j) {
        const double ratio = child.lengths[2 * j] / child.lengths[2 * j + 1];
        CHECK(ratio == doctest::Approx(par.p / par.q).epsilon(1e-12));
        // children partition the parent: right endpoint of the odd child is the parent's
        CHECK(child.rights[2 * j + 1] == doctest::Approx(parent.rights[j]).epsilon(1e-13));
    }
}

TEST_CASE("measure atoms") {
    const SplitParams half(0.5);
    const DiscreteMeasure m0 = measure(0, half);
    REQUIRE(m0.atoms.size() == 1);
    CHECK(m0.atoms[0].weight == 1.0);
    CHECK(m0.atoms[0].location == 1.0);

    const DiscreteMeasure m1 = measure(1, half);
    REQUIRE(m1.atoms.size() == 2);
    CHECK(m1.atoms[0].weight == doctest::Approx(0.5));
    CHECK(m1.atoms[0].location == doctest::Approx(0.5));
    CHECK(m1.atoms[1].weight == doctest::Approx(0.5));
    CHECK(m1.atoms[1].location == 1.0);

    const DiscreteMeasure m10 = measure(10, SplitParams(0.2));
    double mass = 0.0;
    for (const auto& a : m10.atoms) mass += a.weight;
    CHECK(std::abs(mass - 1.0) <= 1e-12);
}

TEST_CASE("level cap refusal") {
    const SplitParams half(0.5);
    CHECK_THROWS_AS(build_intervals(kLevelCap + 1, half), std::invalid_argument);
    CHECK_THROWS_AS(cdf_exact(3, kStreamingLevelCap + 1, half), std::invalid_argument);
}

TEST_CASE("cdf from the measure matches the dp and hand values") {
    const SplitParams half(0.5);
    CHECK(cdf_exact(2, 1, half) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cdf_exact(2, 2, half) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(cdf_exact(5, 0, half) == 0.0);
    for (double p : {0.2, 0.5, 0.8}) {
        const SplitParams par(p);
        for (uint32_t n : {2u, 3u, 7u, 12u}) {
            for (uint32_t k = 0; k <= 10; ++k) {
                CHECK(std::abs(cdf_exact(n, k, par) - exact_cdf_dp(n, int64_t(k), par)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("poissonized cdf: hand value and mixture oracle") {
    const SplitParams half(0.5);
    // two atoms at level 1: e^{-3} + 3 (0.5 e^{-1.5} + 0.5 e^{-3})
    const double expect = std::exp(-3.0) + 3.0 * (0.5 * std::exp(-1.5) + 0.5 * std::exp(-3.0));
    CHECK(poisson_cdf(3.0, 1, half) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(poisson_cdf(0.0, 7, half) == 1.0);

    CHECK(std::abs(poisson_cdf(3.0, 20, half) - poisson_mixture_cdf(3.0, 20, half)) <= 1e-6);
    for (double x : {1.0, 3.0, 10.0})
        for (uint32_t k : {0u, 3u, 9u, 15u})
            CHECK(std::abs(poisson_cdf(x, k, half) - poisson_mixture_cdf(x, int64_t(k), half)) <= 1e-8);

    // increases with k toward 1
    double prev = 0.0;
    for (uint32_t k = 0; k <= 22; ++k) {
        const double v = poisson_cdf(3.0, k, half);
        CHECK(v >= prev - 1e-14);
        prev = v;
    }
    CHECK(1.0 - prev <= 1e-4);
}

TEST_CASE("tail approximation") {
    const SplitParams half(0.5);
    // k = 0: single atom at 1, P(U_{2,n} < 1) = 1
    CHECK(tail_approx(5, 0, half) == doctest::Approx(1.0).epsilon(1e-14));

    // n = 2: P(U_{2,2} < t) = t^2, so the integral is sum len * right^2
    const IntervalDecomposition d = build_intervals(3, half);
    double expect = 0.0;
    for (size_t j = 0; j < d.lengths.size(); ++j) expect += d.lengths[j] * d.rights[j] * d.rights[j];
    CHECK(tail_approx(2, 3, half) == doctest::Approx(expect).epsilon(1e-12));

    // ratio to the exact tail tends to 1 as n grows
    double prev_gap = 1e300;
    for (uint32_t n : {10u, 100u, 1000u}) {
        const double gap = std::abs(tail_approx(n, 3, half) / (1.0 - cdf_exact(n, 3, half)) - 1.0);
        CHECK(gap < prev_gap);
        if (n == 1000) CHECK(gap <= 0.02);
        prev_gap = gap;
    }
}

TEST_CASE("serial and parallel atom reductions agree") {
    const SplitParams par(0.3);
    for (uint32_t k : {3u, 11u, 17u}) {
        CHECK(cdf_exact(9, k, par, Exec::Serial) == doctest::Approx(cdf_exact(9, k, par, Exec::Parallel)).epsilon(1e-14));
        CHECK(poisson_cdf(2.5, k, par, Exec::Serial) ==
              doctest::Approx(poisson_cdf(2.5, k, par, Exec::Parallel)).epsilon(1e-14));
    }
}
