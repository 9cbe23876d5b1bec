#include "leadel/asymptotics.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace leadel {

double frac_part(double z) {
    const double f = z - std::floor(z);
    return f >= 1.0 ? 0.0 : f;
}

double log_base_p(double v, const SplitParams& par) {
    if (!(v > 0.0)) throw std::invalid_argument("log_base_p: argument must be positive");
    const double w = std::log(v) / std::log(par.p);
    const double r = std::round(w);
    if (std::abs(w - r) <= 4e-12 * std::max(1.0, std::abs(w))) return r;
    return w;
}

int64_t ceil_log_p(double v, const SplitParams& par) { return static_cast<int64_t>(std::ceil(log_base_p(v, par))); }

int64_t floor_log_p(double v, const SplitParams& par) { return static_cast<int64_t>(std::floor(log_base_p(v, par))); }

double rho(double z, const SplitParams& par) {
    return (1.0 - std::pow(par.p, 1.0 - frac_part(z))) / (1.0 - par.p);
}

double const_term(const SplitParams& par, double tol) {
    const auto gamma2_tail = [](double s) { return (1.0 + s) * std::exp(-s); };
    const auto mass = [&](int64_t k) {
        // P(ceil(log_p t2) = k) = P(p^k <= t2 < p^{k-1})
        return gamma2_tail(std::pow(par.p, double(k))) - gamma2_tail(std::pow(par.p, double(k - 1)));
    };

    double sum = 0.0;
    for (int64_t k = 1;; ++k) {
        const double m = mass(k);
        sum += double(k) * m;
        if (k > 4 && std::abs(double(k) * m) < tol) break;
        if (k > 4096) throw NumericalError("const_term: positive tail failed to converge");
    }
    for (int64_t k = 0;; --k) {
        const double m = mass(k);
        sum += double(k) * m;
        if (k < -4 && std::abs(double(k) * m) < tol) break;
        if (k < -4096) throw NumericalError("const_term: negative tail failed to converge");
    }
    return sum;
}

double residual_exponent(const SplitParams& par) { return std::log(1.0 - par.delta) / std::log(par.p); }

bool omega_indicator(double x, double y, const SplitParams& par) {
    if (!(x > 0.0) || !(x < 1.0) || !(y > 0.0) || !(y < 1.0))
        throw std::invalid_argument("omega_indicator: x, y must lie in (0,1)");
    return ceil_log_p(y, par) == ceil_log_p(x, par);
}

double big_F_integrand_factor(double w, const SplitParams& par) {
    const double s = frac_part(w);
    const double r = 1.0 - std::pow(par.p, 1.0 - s);
    const double log_p_rho = std::log(r / (1.0 - par.p)) / std::log(par.p);
    const double steps = std::ceil(log_p_rho + w) - std::floor(w);
    return r * steps;
}

// ---- Gauss-Kronrod 7/15 ----------------------------------------------------

namespace {

constexpr double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
                            0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
                            0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
void gk15(F&& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 8; ++i) {
        if (i == 7) {
            const double v = f(c);
            resk += kWgk[7] * v;
            resg += kWg[3] * v;
            break;
        }
        const double v1 = f(c - h * kXgk[i]);
        const double v2 = f(c + h * kXgk[i]);
        resk += kWgk[i] * (v1 + v2);
        if (i % 2 == 1) resg += kWg[i / 2] * (v1 + v2);
    }
    result = resk * h;
    err = std::abs((resk - resg) * h);
}

template <class F>
double adaptive_gk(F&& f, double a, double b, double tol, int depth) {
    double result, err;
    gk15(f, a, b, result, err);
    if (err <= tol || b - a < 1e-15 * std::max(1.0, std::abs(a))) return result;
    if (depth <= 0)
        throw NumericalError("big_F: quadrature failed to converge on panel [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]");
    const double c = 0.5 * (a + b);
    return adaptive_gk(f, a, c, 0.5 * tol, depth - 1) + adaptive_gk(f, c, b, 0.5 * tol, depth - 1);
}

struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

// phi(s) = s + log_p(rho(s)) on [0,1); strictly increasing from 0 to +inf.
// Its integer crossings are the ceiling breakpoints inside one period.
double phi(double s, double p, double log_p) {
    return s + std::log((1.0 - std::pow(p, 1.0 - s)) / (1.0 - p)) / log_p;
}

double solve_phi(double target, double p, double log_p) {
    double lo = 0.0, hi = 1.0 - 1e-16;
    // phi(0) = 0 < target and phi is strictly increasing to +inf; 80 halvings
    // pin the crossing far below the panel tolerance
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phi(mid, p, log_p) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double big_F(double z, const SplitParams& par, const QuadConfig& cfg) {
    // F has period 1; reduce z so the breakpoint grid p^{m+z} stays well scaled
    const double zf = frac_part(z);
    const double p = par.p;
    const double lp = std::log(p);

    const auto log_p_of = [&](double v) { return std::log(v) / lp; };
    const int64_t m_lo = static_cast<int64_t>(std::floor(log_p_of(cfg.y_max) - zf)) - 1;
    const int64_t m_hi = static_cast<int64_t>(std::ceil(log_p_of(cfg.y_min) - zf)) + 1;

    Kahan total;
    for (int64_t m = m_lo; m <= m_hi; ++m) {
        const double y_period_hi = std::pow(p, double(m) + zf);        // w = m
        const double y_period_lo = std::pow(p, double(m + 1) + zf);    // w -> m+1
        if (y_period_lo >= cfg.y_max) continue;
        if (y_period_hi <= cfg.y_min) break;

        // integrand on a panel where the ceiling factor equals `steps`
        const auto make_panel = [&](double steps) {
            return [&, steps](double y) {
                const double s = std::log(y) / lp - zf - double(m);
                const double r = 1.0 - std::pow(p, 1.0 - s);
                return y * r * steps * std::exp(-y);
            };
        };

        double s_prev = 0.0;
        for (int64_t c = 1;; ++c) {
            // on [s_{c-1}, s_c) the factor is c; rho there is at most p^{c-1-s},
            // so contributions die off geometrically in c
            const bool last = (1.0 - p) * std::pow(p, double(c - 2)) * double(c + 1) < 1e-17 || s_prev >= 1.0 - 1e-12;
            const double s_c = last ? 1.0 : solve_phi(double(c), p, lp);
            double y_hi = std::pow(p, double(m) + zf + s_prev);  // y at s_prev
            double y_lo = last ? y_period_lo : std::pow(p, double(m) + zf + s_c);
            y_hi = std::min(y_hi, cfg.y_max);
            y_lo = std::max(y_lo, cfg.y_min);
            if (y_lo < y_hi && y_hi - y_lo > 1e-18 * y_hi)
                total.add(adaptive_gk(make_panel(double(c)), y_lo, y_hi, cfg.panel_tol, cfg.max_panel_depth));
            if (last) break;
            s_prev = s_c;
        }
    }
    return total.sum + total.c;
}

AsymptoticDecomposition asymptotic_mean(uint64_t n, const SplitParams& par, const MeanTable* table) {
    if (n < 2) throw std::invalid_argument("asymptotic_mean: n must be >= 2");
    AsymptoticDecomposition d;
    d.n = n;
    const double log_p_n = std::log(double(n)) / std::log(par.p);
    d.leading = -log_p_n;
    d.constant = const_term(par);
    d.oscillation = big_F(log_p_n, par);
    d.predicted = d.leading + d.constant + d.oscillation;
    if (table && n <= table->n_max()) {
        d.exact = table->values[n];
        d.residual = *d.exact - d.predicted;
    }
    return d;
}

}  // namespace leadel
