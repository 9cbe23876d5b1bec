#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "leadel/split_chain.hpp"

namespace leadel {

// Thrown when a computation cannot reach its configured accuracy (maps to CLI
// exit code 2).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// E(H_0..H_N) solved from the conditional recurrence:
//   E(H_n) = (1 + sum_{j=1}^{n-1} C(n,j) p^j q^{n-j} E(H_j)) / (1 - p^n - q^n)
struct MeanTable {
    double p = 0.0;
    std::vector<double> values;

    uint64_t n_max() const { return values.empty() ? 0 : values.size() - 1; }
    double at(uint64_t n) const { return values.at(n); }
};

MeanTable exact_mean_table(uint64_t N, const SplitParams& par);

// Process-wide cache keyed by the exact bits of p; tables only ever grow.
const MeanTable& cached_mean_table(uint64_t N, const SplitParams& par);

// P(H_n <= k) by dynamic programming over (n, k):
//   P(H_n <= k) = sum_{j=1}^{n} C(n,j) p^j q^{n-j} P(H_j <= k-1) + q^n P(H_n <= k-1)
// with P(H_0 <= k) = P(H_1 <= k) = 1 for k >= 0 and P(. <= -1) = 0.
double exact_cdf_dp(uint32_t n, int64_t k, const SplitParams& par);

// Poisson transform h(x) = sum_{n>=2} E(H_n) x^n/n! e^{-x}, summed term by term.
double poisson_transform_series(double x, const SplitParams& par, double tol = 1e-12);

// Same h evaluated through the functional equation
//   h(x) = h(px) + h(qx) e^{-px} + 1 - (1+x) e^{-x}
// expanded recursively until arguments drop below base_threshold, where the
// series takes over. Throws NumericalError if depth runs out first.
double poisson_transform_fixpoint(double x, const SplitParams& par, int depth = 256, double base_threshold = 0.5);

// De-Poissonized mixture sum_n P(H_n <= k) P(N_x = n); cross-check oracle for
// the interval-measure identity.
double poisson_mixture_cdf(double x, int64_t k, const SplitParams& par);

}  // namespace leadel
