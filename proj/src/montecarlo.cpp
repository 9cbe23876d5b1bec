#include "leadel/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "leadel/asymptotics.hpp"
#include "leadel/mc_harness.hpp"
#include "leadel/protocol.hpp"

namespace leadel {

using mc::Kahan;
using mc::MeanAcc;
using mc::run_trials;

std::pair<double, double> sample_order_stats_pair(uint32_t n, Rng& rng) {
    if (n < 2) throw std::invalid_argument("sample_order_stats_pair: n must be >= 2");
    const double e1 = rng.exponential();
    const double e2 = rng.exponential();
    const double rest = rng.gamma(double(n) - 1.0);
    const double s = e1 + e2 + rest;
    return {e1 / s, (e1 + e2) / s};
}

Estimate mc_mean_cost_via_tau(uint32_t n, const SplitParams& par, uint64_t trials, uint64_t seed,
                              uint64_t max_steps, Exec mode) {
    if (n < 2) throw std::invalid_argument("mc_mean_cost_via_tau: n must be >= 2");
    MeanAcc acc = run_trials<MeanAcc>(trials, seed, mode, [&](Rng& rng, MeanAcc& a) {
        const auto [u1, u2] = sample_order_stats_pair(n, rng);
        const CostWalk w = walk_cost_to_tau(par, u1, u2, rng, max_steps);
        if (w.truncated)
            ++a.truncated;
        else if (w.overflow)
            ++a.overflow;
        else
            a.add(w.cost_sum);
    });
    return acc.finish(trials, seed);
}

Estimate mc_protocol_mean(uint32_t n, const SplitParams& par, uint64_t trials, uint64_t seed, uint64_t max_rounds,
                          Exec mode) {
    MeanAcc acc = run_trials<MeanAcc>(trials, seed, mode, [&](Rng& rng, MeanAcc& a) {
        const ElectionCost c = run_election_cost(n, par, rng, max_rounds);
        if (c.truncated)
            ++a.truncated;
        else
            a.add(double(c.coin_flip_rounds));
    });
    return acc.finish(trials, seed);
}

namespace {

struct LemmaAcc {
    MeanAcc lhs, rhs, diff;
    void merge(const LemmaAcc& o) {
        lhs.merge(o.lhs);
        rhs.merge(o.rhs);
        diff.merge(o.diff);
    }
};

}  // namespace

LemmaCheck mc_lemma_check(double x, double y, const SplitParams& par, uint64_t trials, uint64_t seed,
                          uint64_t max_steps, Exec mode) {
    if (!(x > 0.0) || !(x < y) || !(y < 1.0)) throw std::invalid_argument("mc_lemma_check: need 0 < x < y < 1");

    const int64_t cl = ceil_log_p(y, par);
    const int64_t fl = floor_log_p(y, par);
    const bool omega = omega_indicator(x, y, par);
    const double rho_y = rho(log_base_p(y, par), par);
    const int64_t k_index = ceil_log_p(rho_y * y, par);
    const double deterministic = double(cl) + (omega ? double(k_index - fl) : 0.0);
    const uint64_t tail_start = uint64_t(k_index) + 1;

    LemmaAcc acc = run_trials<LemmaAcc>(trials, seed, mode, [&](Rng& rng, LemmaAcc& a) {
        const CostWalk w = walk_cost_to_tau(par, x, y, rng, max_steps, omega ? tail_start : kNoTailSum);
        if (w.truncated) {
            ++a.lhs.truncated;
            ++a.rhs.truncated;
            ++a.diff.truncated;
            return;
        }
        if (w.overflow) {
            ++a.lhs.overflow;
            ++a.rhs.overflow;
            ++a.diff.overflow;
            return;
        }
        const bool gamma_match = omega && w.gamma0 == fl && w.gamma1 == k_index;
        const double rhs_t = deterministic + (gamma_match ? w.tail_sum : 0.0);
        a.lhs.add(w.cost_sum);
        a.rhs.add(rhs_t);
        a.diff.add(w.cost_sum - rhs_t);
    });

    LemmaCheck out;
    out.lhs = acc.lhs.finish(trials, seed);
    out.rhs = acc.rhs.finish(trials, seed);
    out.diff = acc.diff.finish(trials, seed);
    out.omega = omega;
    out.ceil_log_y = cl;
    out.floor_log_y = fl;
    out.k_index = k_index;
    return out;
}

namespace {

// log-sum-exp accumulator: sum_t exp(l_t) kept as (mx, sum exp(l - mx))
struct Lse {
    double mx = -std::numeric_limits<double>::infinity();
    double s = 0.0;

    void add(double l) {
        if (s == 0.0) {
            mx = l;
            s = 1.0;
        } else if (l <= mx) {
            s += std::exp(l - mx);
        } else {
            s = s * std::exp(mx - l) + 1.0;
            mx = l;
        }
    }
    void merge(const Lse& o) {
        if (o.s == 0.0) return;
        if (s == 0.0) {
            *this = o;
        } else if (o.mx <= mx) {
            s += o.s * std::exp(o.mx - mx);
        } else {
            s = s * std::exp(mx - o.mx) + o.s;
            mx = o.mx;
        }
    }
    double log_sum() const { return mx + std::log(s); }
};

struct ConjAcc {
    Lse moment;   // sum exp(l_t)
    Lse moment2;  // sum exp(2 l_t)
    double l_top = -std::numeric_limits<double>::infinity();
    Kahan tau_sum, tau_sumsq;
    uint64_t count = 0;
    uint64_t truncated = 0;
    uint64_t max_tau = 0;

    void merge(const ConjAcc& o) {
        moment.merge(o.moment);
        moment2.merge(o.moment2);
        l_top = std::max(l_top, o.l_top);
        tau_sum.merge(o.tau_sum);
        tau_sumsq.merge(o.tau_sumsq);
        count += o.count;
        truncated += o.truncated;
        max_tau = std::max(max_tau, o.max_tau);
    }
};

}  // namespace

ConjecturePoint mc_conjecture_point(double x, const SplitParams& par, uint64_t trials, uint64_t seed,
                                    uint64_t max_steps, Exec mode) {
    if (!(x > 0.0) || !(x < 1.0)) throw std::invalid_argument("mc_conjecture_point: x must lie in (0,1)");
    const double log_moment_per_step = -2.0 * std::log(par.delta);  // ln(1/delta^2)

    ConjAcc acc = run_trials<ConjAcc>(trials, seed, mode, [&](Rng& rng, ConjAcc& a) {
        const CostWalk w = walk_cost_to_tau(par, x, x, rng, max_steps);
        if (w.truncated) {
            ++a.truncated;
            return;
        }
        const double l = double(w.tau) * log_moment_per_step;
        a.moment.add(l);
        a.moment2.add(2.0 * l);
        a.l_top = std::max(a.l_top, l);
        a.tau_sum.add(double(w.tau));
        a.tau_sumsq.add(double(w.tau) * double(w.tau));
        ++a.count;
        a.max_tau = std::max(a.max_tau, w.tau);
    });

    ConjecturePoint out;
    out.x = x;
    out.trials = trials;
    out.seed = seed;
    out.truncated = acc.truncated;
    out.max_tau = acc.max_tau;
    if (acc.count == 0) return out;

    const double ln_count = std::log(double(acc.count));
    const double l1 = acc.moment.log_sum() - ln_count;   // ln of the moment estimate
    const double l2 = acc.moment2.log_sum() - ln_count;  // ln of the second-moment estimate
    out.log10_moment = l1 / std::numbers::ln10;
    out.top_trial_share = std::exp(acc.l_top - acc.moment.log_sum());

    const double d = 2.0 * l1 - l2;  // <= 0
    if (acc.count > 1 && d < -1e-15) {
        const double ln_var = l2 + std::log1p(-std::exp(d)) + std::log(double(acc.count) / double(acc.count - 1));
        const double ln_se = 0.5 * ln_var - 0.5 * ln_count;
        out.moment_stderr_log10 = std::exp(ln_se - l1) / std::numbers::ln10;
    }

    out.mean_tau = acc.tau_sum.get() / double(acc.count);
    if (acc.count > 1) {
        const double var = std::max(
            0.0, (acc.tau_sumsq.get() - double(acc.count) * out.mean_tau * out.mean_tau) / double(acc.count - 1));
        out.tau_stderr = std::sqrt(var / double(acc.count));
    }
    return out;
}

std::vector<ConjecturePoint> mc_conjecture(const std::vector<double>& xgrid, const SplitParams& par, uint64_t trials,
                                           uint64_t seed, uint64_t max_steps, Exec mode) {
    std::vector<ConjecturePoint> out;
    out.reserve(xgrid.size());
    for (size_t i = 0; i < xgrid.size(); ++i)
        out.push_back(mc_conjecture_point(xgrid[i], par, trials, seed + i, max_steps, mode));
    return out;
}

}  // namespace leadel
