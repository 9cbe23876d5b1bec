#include "leadel/split_chain.hpp"

#include <cmath>

namespace leadel {

std::vector<uint64_t> jump_indices(std::span<const SplitStep> steps) {
    std::vector<uint64_t> out;
    for (uint64_t j = 0; j < steps.size(); ++j)
        if (steps[j].is_jump()) out.push_back(j);
    return out;
}

HittingTimes hitting_times(const SplitParams& par, double x, double y, Rng& rng, uint64_t max_steps) {
    if (!(x > 0.0) || !(x <= y) || !(y < 1.0)) throw std::invalid_argument("hitting_times: need 0 < x <= y < 1");
    if (max_steps < 1) throw std::invalid_argument("hitting_times: max_steps must be >= 1");

    HittingTimes ht;
    SplitChain chain;
    while (chain.index < max_steps) {
        chain.advance(sample_step(par, rng));
        if (chain.alpha > x) {
            ht.nu = chain.index;
            ht.tau = chain.index;
            return ht;
        }
        if (chain.envelope() < y) {
            ht.mu = chain.index;
            ht.tau = chain.index;
            return ht;
        }
    }
    ht.truncated = true;
    return ht;
}

CostWalk walk_cost_to_tau(const SplitParams& par, double x, double y, Rng& rng, uint64_t max_steps,
                          uint64_t tail_start) {
    if (!(x > 0.0) || !(x <= y) || !(y < 1.0)) throw std::invalid_argument("walk_cost_to_tau: need 0 < x <= y < 1");
    if (max_steps < 1) throw std::invalid_argument("walk_cost_to_tau: max_steps must be >= 1");

    // pi_i = p^keeps * q^jumps; the counter form keeps log(pi) exact enough
    // for 1/pi once the linear product has underflowed.
    const double log_p = std::log(par.p);
    const double log_q = std::log(par.q);

    CostWalk w;
    double pi = 1.0;
    double alpha = 0.0;
    uint64_t keeps = 0, jumps = 0;
    uint64_t i = 0;

    for (;;) {
        if (i >= max_steps) {
            w.truncated = true;
            return w;
        }

        // index i is known to precede tau here, so 1/pi_i enters the sums
        double inv_pi;
        if (pi >= 1e-300) {
            inv_pi = 1.0 / pi;
        } else {
            const double neg_log_pi = -(static_cast<double>(keeps) * log_p + static_cast<double>(jumps) * log_q);
            if (neg_log_pi > 709.0) {
                w.overflow = true;
                return w;
            }
            inv_pi = std::exp(neg_log_pi);
        }
        w.cost_sum += inv_pi;
        if (i >= tail_start) w.tail_sum += inv_pi;
        if (!std::isfinite(w.cost_sum)) {
            w.overflow = true;
            return w;
        }

        const bool jump = !rng.bernoulli(par.p);
        if (jump) {
            if (w.gamma0 < 0)
                w.gamma0 = static_cast<int64_t>(i);
            else if (w.gamma1 < 0)
                w.gamma1 = static_cast<int64_t>(i);
            alpha += pi * par.p;
            pi *= par.q;
            ++jumps;
        } else {
            pi *= par.p;
            ++keeps;
        }
        ++i;

        if (alpha > x) {
            w.tau = i;
            w.nu_fired = true;
            return w;
        }
        if (alpha + pi < y) {
            w.tau = i;
            w.mu_fired = true;
            return w;
        }
    }
}

}  // namespace leadel
