#include "leadel/crossval.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "leadel/asymptotics.hpp"
#include "leadel/exact.hpp"
#include "leadel/intervals.hpp"
#include "leadel/mc_harness.hpp"
#include "leadel/montecarlo.hpp"
#include "leadel/protocol.hpp"

namespace leadel {

namespace {

constexpr uint64_t kSuiteSeed = 0x1eade1;

uint64_t cell_seed(uint64_t tag, uint64_t a, uint64_t b) { return mix64(kSuiteSeed ^ mix64(tag) ^ mix64(a * 1315423911u + b)); }

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return std::string(buf);
}

bool within(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// --- criterion 1: Fig. 1 replay ---------------------------------------------

CriterionResult criterion_fig1() {
    CriterionResult r{1, "fig1-replay", false, ""};
    const std::vector<std::vector<uint8_t>> script = {{1, 1, 1, 0}, {0, 0, 0}, {1, 0, 0}};
    const ElectionTrace t = run_election_scripted(4, script);
    const bool leader_ok = t.leader && *t.leader == 0;
    r.pass = leader_ok && t.time_units == 4 && t.coin_flip_rounds == 3;
    r.detail = fmt("leader=%s time_units=%llu coin_flip_rounds=%llu", t.leader ? (*t.leader == 0 ? "A" : "other") : "none",
                   (unsigned long long)t.time_units, (unsigned long long)t.coin_flip_rounds);
    return r;
}

// --- criterion 2: triple agreement on E(H_n) ---------------------------------

CriterionResult criterion_triple_agreement() {
    CriterionResult r{2, "triple-agreement", true, ""};
    const uint32_t ns[] = {2, 5, 10, 20, 50};
    const double ps[] = {0.2, 0.5, 0.8};
    const uint64_t trials = 100000;
    double worst = 0.0;
    for (size_t pi = 0; pi < 3; ++pi) {
        const SplitParams par(ps[pi]);
        const MeanTable& table = cached_mean_table(50, par);
        for (size_t ni = 0; ni < 5; ++ni) {
            const uint32_t n = ns[ni];
            const double exact = table.values[n];
            const Estimate proto = mc_protocol_mean(n, par, trials, cell_seed(2, pi, ni));
            const Estimate tau = mc_mean_cost_via_tau(n, par, trials, cell_seed(0xb2, pi, ni));
            if (proto.truncated_count || tau.truncated_count || tau.overflow_count) {
                r.pass = false;
                r.detail = fmt("n=%u p=%.1f: truncated/overflowed trials", n, ps[pi]);
                continue;
            }
            const double s_pt = 3.0 * std::hypot(proto.std_err, tau.std_err);
            const bool ok = within(proto.value, tau.value, s_pt) && within(proto.value, exact, 3.0 * proto.std_err) &&
                            within(tau.value, exact, 3.0 * tau.std_err);
            const double dev = std::max({std::abs(proto.value - tau.value) / std::max(s_pt, 1e-300),
                                         std::abs(proto.value - exact) / std::max(3.0 * proto.std_err, 1e-300),
                                         std::abs(tau.value - exact) / std::max(3.0 * tau.std_err, 1e-300)});
            worst = std::max(worst, dev);
            if (!ok) {
                r.pass = false;
                r.detail = fmt("n=%u p=%.1f: exact=%.4f proto=%.4f+-%.4f tau=%.4f+-%.4f", n, ps[pi], exact, proto.value,
                               proto.std_err, tau.value, tau.std_err);
            }
        }
    }
    if (r.pass) r.detail = fmt("15 cells x 3 pairwise checks, worst deviation %.2f of allowance", worst);
    return r;
}

// --- criterion 3: cdf_exact == exact_cdf_dp ----------------------------------

CriterionResult criterion_interval_dp_identity() {
    CriterionResult r{3, "interval-dp-identity", true, ""};
    double worst = 0.0;
    for (double p : {0.2, 0.5, 0.8}) {
        const SplitParams par(p);
        for (uint32_t k = 0; k <= 15; ++k) {
            for (uint32_t n = 2; n <= 30; ++n) {
                const double a = cdf_exact(n, k, par);
                const double b = exact_cdf_dp(n, int64_t(k), par);
                worst = std::max(worst, std::abs(a - b));
            }
        }
    }
    r.pass = worst <= 1e-10;
    r.detail = fmt("max |cdf_exact - cdf_dp| = %.3e over n<=30, k<=15, p in {0.2,0.5,0.8} (tol 1e-10)", worst);
    return r;
}

// --- criterion 4: Poisson consistency ----------------------------------------

CriterionResult criterion_poisson_consistency() {
    CriterionResult r{4, "poisson-consistency", true, ""};
    double worst_transform = 0.0;
    for (double p : {0.3, 0.5, 0.7}) {
        const SplitParams par(p);
        for (double x : {1.0, 5.0, 10.0}) {
            const double a = poisson_transform_series(x, par);
            const double b = poisson_transform_fixpoint(x, par);
            worst_transform = std::max(worst_transform, std::abs(a - b));
        }
    }
    double worst_cdf = 0.0;
    for (double p : {0.2, 0.5, 0.8}) {
        const SplitParams par(p);
        for (double x : {1.0, 3.0, 10.0}) {
            for (uint32_t k = 0; k <= 15; ++k) {
                const double a = poisson_cdf(x, k, par);
                const double b = poisson_mixture_cdf(x, int64_t(k), par);
                worst_cdf = std::max(worst_cdf, std::abs(a - b));
            }
        }
    }
    r.pass = worst_transform <= 1e-8 && worst_cdf <= 1e-8;
    r.detail = fmt("max |series - fixpoint| = %.3e, max |poisson_cdf - mixture| = %.3e (tol 1e-8)", worst_transform,
                   worst_cdf);
    return r;
}

// --- criterion 5: Lemma, common random numbers -------------------------------

CriterionResult criterion_lemma() {
    CriterionResult r{5, "lemma-crn", true, ""};
    const double xy[][2] = {{0.3, 0.35}, {0.1, 0.9}, {0.55, 0.6}};
    double worst = 0.0;
    for (size_t pi = 0; pi < 3; ++pi) {
        const double p = (pi == 0) ? 0.3 : (pi == 1 ? 0.5 : 0.7);
        const SplitParams par(p);
        for (size_t c = 0; c < 3; ++c) {
            const LemmaCheck chk = mc_lemma_check(xy[c][0], xy[c][1], par, 100000, cell_seed(5, pi, c));
            if (chk.diff.truncated_count || chk.diff.overflow_count) {
                r.pass = false;
                r.detail = fmt("p=%.1f (x,y)=(%.2f,%.2f): truncated/overflowed trials", p, xy[c][0], xy[c][1]);
                continue;
            }
            const double allow = 3.0 * chk.diff.std_err + 1e-12;
            worst = std::max(worst, std::abs(chk.diff.value) / allow);
            if (std::abs(chk.diff.value) > allow) {
                r.pass = false;
                r.detail = fmt("p=%.1f (x,y)=(%.2f,%.2f): lhs=%.5f rhs=%.5f diff=%.3e allow=%.3e", p, xy[c][0], xy[c][1],
                               chk.lhs.value, chk.rhs.value, chk.diff.value, allow);
            }
        }
    }
    if (r.pass) r.detail = fmt("9 cells, worst |lhs-rhs| at %.2f of the 3-sigma allowance", worst);
    return r;
}

// --- criterion 6: residual decay ---------------------------------------------

CriterionResult criterion_residual_decay() {
    CriterionResult r{6, "residual-decay", true, ""};
    {
        const SplitParams par(0.5);
        const MeanTable table = exact_mean_table(4096, par);
        double r64 = 0.0, r4096 = 0.0;
        double first_half_max = 0.0, second_half_max = 0.0;
        for (int e = 6; e <= 12; ++e) {
            const uint64_t n = uint64_t(1) << e;
            const AsymptoticDecomposition d = asymptotic_mean(n, par, &table);
            const double resid = std::abs(*d.residual);
            if (e == 6) r64 = resid;
            if (e == 12) r4096 = resid;
            const double scaled = resid * double(n);  // beta = 1 at p = 0.5
            if (e <= 9)
                first_half_max = std::max(first_half_max, scaled);
            else
                second_half_max = std::max(second_half_max, scaled);
        }
        const bool ok = r4096 <= 0.05 && r4096 <= 0.5 * r64 && second_half_max <= 1.5 * first_half_max;
        if (!ok) r.pass = false;
        r.detail = fmt("p=0.5: |R(4096)|=%.2e (<=0.05, <=R(64)/2=%.2e); n*R bounded: %.3f vs %.3f", r4096, 0.5 * r64,
                       second_half_max, first_half_max);
    }
    {
        const SplitParams par(0.2);
        const MeanTable table = exact_mean_table(10000, par);
        double resid[3];
        const uint64_t ns[3] = {100, 1000, 10000};
        for (int i = 0; i < 3; ++i) resid[i] = std::abs(*asymptotic_mean(ns[i], par, &table).residual);
        const bool ok = std::isfinite(resid[0]) && resid[1] <= resid[0] && resid[2] <= resid[1];
        if (!ok) r.pass = false;
        r.detail += fmt("; p=0.2 envelope: %.3e >= %.3e >= %.3e", resid[0], resid[1], resid[2]);
    }
    return r;
}

// --- criterion 7: F oscillation ----------------------------------------------

CriterionResult criterion_big_f() {
    CriterionResult r{7, "F-oscillation", true, ""};
    double worst_period = 0.0, worst_mc = 0.0;
    for (double p : {0.3, 0.5}) {
        const SplitParams par(p);
        for (double z : {0.1, 0.37, 0.9}) {
            const double f = big_F(z, par);
            const double f1 = big_F(z + 1.0, par);
            worst_period = std::max(worst_period, std::abs(f1 - f));
            // Gamma(2,1) Monte Carlo of the same integrand: t2 = E1 + E2
            const Estimate mc_est =
                mc::mc_mean(10000000, cell_seed(7, size_t(p * 10), size_t(z * 100)), Exec::Parallel, [&](Rng& rng) {
                    const double t2 = rng.exponential() + rng.exponential();
                    return big_F_integrand_factor(std::log(t2) / std::log(p) - z, par);
                });
            const double dev = std::abs(mc_est.value - f) / (3.0 * mc_est.std_err);
            worst_mc = std::max(worst_mc, dev);
            if (std::abs(mc_est.value - f) > 3.0 * mc_est.std_err) r.pass = false;
        }
    }
    if (worst_period > 1e-8) r.pass = false;
    r.detail = fmt("max |F(z+1)-F(z)| = %.2e (tol 1e-8); MC oracle worst deviation %.2f of 3 sigma", worst_period,
                   worst_mc);
    return r;
}

// --- criterion 8: conjecture study -------------------------------------------

CriterionResult criterion_conjecture() {
    CriterionResult r{8, "conjecture-study", true, ""};
    const SplitParams par(0.5);
    std::vector<double> grid;
    for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
    const std::vector<ConjecturePoint> pts = mc_conjecture(grid, par, 100000, cell_seed(8, 0, 0));

    uint64_t truncated = 0;
    size_t argmax = 0;
    bool finite = true, tau_bound = true;
    for (size_t i = 0; i < pts.size(); ++i) {
        truncated += pts[i].truncated;
        finite = finite && std::isfinite(pts[i].log10_moment) && std::isfinite(pts[i].mean_tau);
        tau_bound = tau_bound && (pts[i].mean_tau + 3.0 * pts[i].tau_stderr < 23.25);
        if (pts[i].log10_moment > pts[argmax].log10_moment) argmax = i;
    }
    const double x_star = pts[argmax].x;
    const bool interior = argmax > 0 && argmax + 1 < pts.size() && x_star >= 0.35 && x_star <= 0.65;
    r.pass = finite && truncated == 0 && interior && tau_bound;
    r.detail = fmt("argmax E(4^tau) at x=%.2f (log10=%.2f), max E(tau)+3se=%.2f < 23.25, truncated=%llu; "
                   "figure-scale peak magnitudes (1e14/1e80) are tail-dominated and not reproduced at desk scale",
                   x_star, pts[argmax].log10_moment,
                   [&] {
                       double m = 0;
                       for (const auto& pt : pts) m = std::max(m, pt.mean_tau + 3.0 * pt.tau_stderr);
                       return m;
                   }(),
                   (unsigned long long)truncated);
    return r;
}

// --- criterion 9: tail-sum identity ------------------------------------------

CriterionResult criterion_tail_sum() {
    CriterionResult r{9, "tail-sum-identity", true, ""};
    double worst = 0.0;
    for (double p : {0.2, 0.5, 0.8}) {
        const SplitParams par(p);
        const MeanTable& table = cached_mean_table(50, par);
        for (uint32_t n = 2; n <= 50; ++n) {
            double sum = 0.0;
            for (int64_t k = 0; k < 100000; ++k) {
                const double tail = 1.0 - exact_cdf_dp(n, k, par);
                sum += tail;
                if (tail <= 1e-12 && k > 1) break;
            }
            worst = std::max(worst, std::abs(sum - table.values[n]));
        }
    }
    r.pass = worst <= 1e-9;
    r.detail = fmt("max |sum_k P(H_n > k) - E(H_n)| = %.3e over n<=50 (tol 1e-9)", worst);
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite(std::ostream& out) {
    std::vector<CriterionResult> results;
    const auto run = [&](CriterionResult (*fn)()) {
        CriterionResult r = fn();
        out << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name << ": " << r.detail << "\n";
        out.flush();
        results.push_back(std::move(r));
    };
    run(criterion_fig1);
    run(criterion_triple_agreement);
    run(criterion_interval_dp_identity);
    run(criterion_poisson_consistency);
    run(criterion_lemma);
    run(criterion_residual_decay);
    run(criterion_big_f);
    run(criterion_conjecture);
    run(criterion_tail_sum);
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

}  // namespace leadel
