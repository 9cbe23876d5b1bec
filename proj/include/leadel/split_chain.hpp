#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "leadel/rng.hpp"

namespace leadel {

// Splitting probability p plus its derived companions. delta = min(p,q) is the
// contraction rate that controls the heavy tail of the hitting time.
struct SplitParams {
    double p;
    double q;
    double delta;

    explicit SplitParams(double p_) : p(p_), q(1.0 - p_), delta(p_ < 1.0 - p_ ? p_ : 1.0 - p_) {
        if (!(p_ > 0.0) || !(p_ < 1.0)) throw std::invalid_argument("SplitParams: p must lie in (0,1)");
    }
};

// One draw of the pair (A,B): (p,0) with probability p, (q,p) with probability q.
struct SplitStep {
    double a;
    double b;

    static SplitStep keep(const SplitParams& par) { return {par.p, 0.0}; }
    static SplitStep jump(const SplitParams& par) { return {par.q, par.p}; }
    bool is_jump() const { return b != 0.0; }
};

inline SplitStep sample_step(const SplitParams& par, Rng& rng) {
    return rng.bernoulli(par.p) ? SplitStep::keep(par) : SplitStep::jump(par);
}

// State of the multiplicative/additive pair (pi_i, alpha_i).
// pi_0 = 1, alpha_0 = 0; advance: pi' = a*pi, alpha' = alpha + pi*b.
// log_pi shadows pi so that 1/pi stays usable after pi underflows.
struct SplitChain {
    uint64_t index = 0;
    double pi = 1.0;
    double alpha = 0.0;
    double log_pi = 0.0;

    void advance(const SplitStep& s) {
        alpha += pi * s.b;
        pi *= s.a;
        log_pi += std::log(s.a);
        ++index;
    }

    double envelope() const { return alpha + pi; }
};

// Indices j with b_j = p in a step prefix; these are the realized gamma_i.
std::vector<uint64_t> jump_indices(std::span<const SplitStep> steps);

// Result of walking a chain until alpha_i > x (nu) or alpha_i + pi_i < y (mu).
// Exactly one of the two fires first; tau is its index. A walk that reaches
// max_steps is Truncated and carries no tau.
struct HittingTimes {
    std::optional<uint64_t> nu;
    std::optional<uint64_t> mu;
    uint64_t tau = 0;
    bool truncated = false;
};

HittingTimes hitting_times(const SplitParams& par, double x, double y, Rng& rng, uint64_t max_steps);

// Walk to tau while accumulating sum_{i=0}^{tau-1} 1/pi_i (the per-trial cost)
// and, when tail_start is given, the partial sum over i in [tail_start, tau).
// gamma0/gamma1 are the first two jump indices seen (-1 if not reached).
// overflow means a 1/pi_i term or the accumulated sum left double range; the
// numeric fields of an overflowed walk must not be used.
struct CostWalk {
    uint64_t tau = 0;
    bool truncated = false;
    bool overflow = false;
    double cost_sum = 0.0;
    double tail_sum = 0.0;
    int64_t gamma0 = -1;
    int64_t gamma1 = -1;
    bool nu_fired = false;
    bool mu_fired = false;
};

constexpr uint64_t kNoTailSum = ~0ull;

CostWalk walk_cost_to_tau(const SplitParams& par, double x, double y, Rng& rng, uint64_t max_steps,
                          uint64_t tail_start = kNoTailSum);

}  // namespace leadel
