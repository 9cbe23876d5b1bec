#pragma once

#include <cstdint>
#include <optional>

#include "leadel/exact.hpp"
#include "leadel/split_chain.hpp"

namespace leadel {

// Fractional part z - floor(z), in [0,1).
double frac_part(double z);

// log_p(v) = ln v / ln p, snapped to the nearest integer when within a few
// ulps of one; p^k inputs would otherwise land an ulp off an integer log and
// push a ceiling to the wrong side.
double log_base_p(double v, const SplitParams& par);
int64_t ceil_log_p(double v, const SplitParams& par);
int64_t floor_log_p(double v, const SplitParams& par);

// rho(z) = (1 - p^{1-{z}}) / (1 - p); periodic, sup 1 (at {z} = 0), inf 0.
double rho(double z, const SplitParams& par);

// E(ceil(log_p t2)) with t2 ~ Gamma(2,1): sum over k of
// k [Gamma2(p^k) - Gamma2(p^{k-1})], Gamma2(s) = P(t2 > s) = (1+s) e^{-s}.
double const_term(const SplitParams& par, double tol = 1e-13);

// beta = log_p(1 - delta): the decay exponent of the rest term R(n).
double residual_exponent(const SplitParams& par);

// Omega(x,y): ceil(log_p y) == ceil(log_p x).
bool omega_indicator(double x, double y, const SplitParams& par);

// Non-smooth factor of the oscillation integrand at w = log_p y - z:
//   (1 - p^{1-{w}}) (ceil(log_p rho(w) + w) - floor(w))
// The ceiling factor grows as {w} -> 1 but is damped by the vanishing first
// factor, so the product stays bounded.
double big_F_integrand_factor(double w, const SplitParams& par);

struct QuadConfig {
    double panel_tol = 1e-13;   // absolute Gauss-Kronrod tolerance per panel
    double y_min = 1e-9;        // below this the integrand contributes < 1e-17
    double y_max = 40.0;        // Gamma(2,1) tail beyond this is < 1e-14
    int max_panel_depth = 32;
};

// Periodic oscillation F(z): integral of y * factor(log_p y - z) * e^{-y},
// split at the exact breakpoints y = p^{m+z} and at the ceiling crossings
// inside each period, each panel integrated by adaptive Gauss-Kronrod 7/15.
double big_F(double z, const SplitParams& par, const QuadConfig& cfg = {});

// The asymptotic expansion of E(H_n) term by term. `exact` and `residual` are
// filled when a mean table covering n is supplied.
struct AsymptoticDecomposition {
    uint64_t n = 0;
    double leading = 0.0;      // -log_p n
    double constant = 0.0;     // E(ceil(log_p t2))
    double oscillation = 0.0;  // F(log_p n)
    double predicted = 0.0;    // sum of the three
    std::optional<double> exact;
    std::optional<double> residual;  // exact - predicted
};

AsymptoticDecomposition asymptotic_mean(uint64_t n, const SplitParams& par, const MeanTable* table = nullptr);

}  // namespace leadel
