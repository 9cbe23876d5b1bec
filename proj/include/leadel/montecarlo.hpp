#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "leadel/exec.hpp"
#include "leadel/rng.hpp"
#include "leadel/split_chain.hpp"

namespace leadel {

inline constexpr uint64_t kDefaultMaxSteps = 1'000'000;

// Monte Carlo result. Truncated and overflowed trials are excluded from the
// mean but always reported; an estimate with truncated_count > 0 is suspect
// and the CLI warns about it.
struct Estimate {
    double value = 0.0;
    double std_err = 0.0;  // sample std dev / sqrt(count)
    uint64_t trials = 0;
    uint64_t truncated_count = 0;
    uint64_t overflow_count = 0;
    uint64_t seed = 0;
};

// (U_{1,n}, U_{2,n}): the two smallest of n i.i.d. uniforms, via exponential
// spacings E1, E2 and R ~ Gamma(n-1,1): u1 = E1/S, u2 = (E1+E2)/S.
std::pair<double, double> sample_order_stats_pair(uint32_t n, Rng& rng);

// E(H_n) through the hitting-time representation:
// E(H_n) = E(sum_{i<tau(U1,U2)} 1/pi_i).
Estimate mc_mean_cost_via_tau(uint32_t n, const SplitParams& par, uint64_t trials, uint64_t seed,
                              uint64_t max_steps = kDefaultMaxSteps, Exec mode = Exec::Parallel);

// E(H_n) by direct protocol simulation (mean coin-flip rounds).
Estimate mc_protocol_mean(uint32_t n, const SplitParams& par, uint64_t trials, uint64_t seed,
                          uint64_t max_rounds = kDefaultMaxSteps, Exec mode = Exec::Parallel);

// Both sides of the cost decomposition lemma, estimated with common random
// numbers: lhs is the raw cost sum to tau(x,y); rhs is
//   ceil(log_p y) + (K - floor(log_p y)) 1_Omega
//     + (tail sum over i in [K+1, tau)) 1{gamma0 = floor(log_p y), gamma1 = K} 1_Omega
// with K = ceil(log_p(rho(log_p y) y)). diff tracks lhs - rhs per trial; its
// stderr is the right scale for the identity check.
struct LemmaCheck {
    Estimate lhs;
    Estimate rhs;
    Estimate diff;
    bool omega = false;
    int64_t ceil_log_y = 0;
    int64_t floor_log_y = 0;
    int64_t k_index = 0;  // K above
};

LemmaCheck mc_lemma_check(double x, double y, const SplitParams& par, uint64_t trials, uint64_t seed,
                          uint64_t max_steps = kDefaultMaxSteps, Exec mode = Exec::Parallel);

// One grid point of the exponential-moment study of tau(x,x). The moment
// E((1/delta^2)^tau) is accumulated in log space (log-sum-exp) and reported as
// log10; top_trial_share flags tail-dominated estimates.
struct ConjecturePoint {
    double x = 0.0;
    double log10_moment = 0.0;
    double moment_stderr_log10 = 0.0;  // delta-method stderr of log10(moment)
    double mean_tau = 0.0;
    double tau_stderr = 0.0;
    uint64_t truncated = 0;
    uint64_t trials = 0;
    uint64_t seed = 0;
    uint64_t max_tau = 0;
    double top_trial_share = 0.0;  // fraction of the moment carried by the largest trial
};

ConjecturePoint mc_conjecture_point(double x, const SplitParams& par, uint64_t trials, uint64_t seed,
                                    uint64_t max_steps = kDefaultMaxSteps, Exec mode = Exec::Parallel);

std::vector<ConjecturePoint> mc_conjecture(const std::vector<double>& xgrid, const SplitParams& par, uint64_t trials,
                                           uint64_t seed, uint64_t max_steps = kDefaultMaxSteps,
                                           Exec mode = Exec::Parallel);

}  // namespace leadel
