#pragma once

#include <cstdint>
#include <vector>

#include "leadel/exact.hpp"
#include "leadel/exec.hpp"
#include "leadel/split_chain.hpp"

namespace leadel {

// Base-(p,q) binary decomposition of [0,1] at level k: 2^k intervals whose
// lengths are the digit products prod p_{a_i}. Children of an interval of
// length L split it into p*L (left) and q*L (right).
struct IntervalDecomposition {
    uint32_t level = 0;
    std::vector<double> rights;   // strictly increasing, last element 1
    std::vector<double> lengths;  // positive, sum to 1
};

// The measure mu_k: each interval's length placed at its right extremity.
struct DiscreteMeasure {
    struct Atom {
        double weight;
        double location;
    };
    std::vector<Atom> atoms;
};

inline constexpr uint32_t kLevelCap = 25;         // materialized arrays (2^25 atoms)
inline constexpr uint32_t kStreamingLevelCap = 40;  // streaming scans, running sums only

IntervalDecomposition build_intervals(uint32_t k, const SplitParams& par);

// One stage of the defining recursion; used to cross-check build_intervals.
IntervalDecomposition refine_intervals(const IntervalDecomposition& parent, const SplitParams& par);

// Digit-product form of an interval length (the second code path).
double interval_length_by_digits(uint32_t k, uint64_t index, const SplitParams& par);

DiscreteMeasure measure(uint32_t k, const SplitParams& par);

// P(H_n <= k) = n * sum_j len_j (1 - right_j)^{n-1}
double cdf_exact(uint32_t n, uint32_t k, const SplitParams& par, Exec mode = Exec::Parallel);

// P(H_{N_x} <= k) = e^{-x} + x * sum_j len_j e^{-x right_j}
double poisson_cdf(double x, uint32_t k, const SplitParams& par, Exec mode = Exec::Parallel);

// int P(U_{2,n} < t) dmu_k(t); asymptotic form of the tail P(H_n > k)
double tail_approx(uint32_t n, uint32_t k, const SplitParams& par, Exec mode = Exec::Parallel);

}  // namespace leadel
