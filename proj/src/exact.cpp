#include "leadel/exact.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>

namespace leadel {

namespace {

// Kahan-compensated accumulator for the recurrence convolutions.
struct Kahan {
    double sum = 0.0;
    double c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

// Binomial row C(n,j) p^j q^{n-j} restricted to the window where the weights
// exceed cutoff. Anchored at the mode in log space and spread multiplicatively,
// so rows stay accurate for n in the thousands without underflow traps.
struct BinomialRow {
    uint32_t j_lo = 0;
    std::vector<double> w;  // w[j - j_lo]

    double at(uint32_t j) const {
        if (j < j_lo || j >= j_lo + w.size()) return 0.0;
        return w[j - j_lo];
    }
};

BinomialRow binomial_row(uint32_t n, double p, double q, double cutoff) {
    BinomialRow row;
    if (n == 0) {
        row.w = {1.0};
        return row;
    }
    const double lp = std::log(p), lq = std::log(q);
    const auto lweight = [&](uint32_t j) {
        return std::lgamma(double(n) + 1.0) - std::lgamma(double(j) + 1.0) - std::lgamma(double(n - j) + 1.0) +
               double(j) * lp + double(n - j) * lq;
    };
    uint32_t mode = static_cast<uint32_t>(std::floor(double(n + 1) * p));
    if (mode > n) mode = n;
    const double wmode = std::exp(lweight(mode));

    // walk down from the mode
    std::vector<double> down;
    double v = wmode;
    for (uint32_t j = mode;; --j) {
        down.push_back(v);
        if (j == 0) break;
        v *= (double(j) / double(n - j + 1)) * (q / p);
        if (v < cutoff) break;
    }
    row.j_lo = mode + 1 - static_cast<uint32_t>(down.size());
    row.w.assign(down.rbegin(), down.rend());

    // walk up
    v = wmode;
    for (uint32_t j = mode + 1; j <= n; ++j) {
        v *= (double(n - j + 1) / double(j)) * (p / q);
        if (v < cutoff) break;
        row.w.push_back(v);
    }
    return row;
}

}  // namespace

MeanTable exact_mean_table(uint64_t N, const SplitParams& par) {
    if (N < 1) throw std::invalid_argument("exact_mean_table: N must be >= 1");
    MeanTable table;
    table.p = par.p;
    table.values.assign(N + 1, 0.0);

    for (uint64_t n = 2; n <= N; ++n) {
        const BinomialRow row = binomial_row(static_cast<uint32_t>(n), par.p, par.q, 1e-22);
        Kahan conv;
        const uint32_t j_hi = static_cast<uint32_t>(std::min<uint64_t>(n - 1, row.j_lo + row.w.size() - 1));
        for (uint32_t j = std::max<uint32_t>(row.j_lo, 2); j <= j_hi; ++j) conv.add(row.at(j) * table.values[j]);
        const double denom = 1.0 - std::exp(double(n) * std::log(par.p)) - std::exp(double(n) * std::log(par.q));
        table.values[n] = (1.0 + conv.sum) / denom;
    }
    return table;
}

namespace {

std::mutex g_mean_mutex;
std::map<uint64_t, MeanTable> g_mean_cache;  // key: bit pattern of p

}  // namespace

const MeanTable& cached_mean_table(uint64_t N, const SplitParams& par) {
    std::lock_guard<std::mutex> lock(g_mean_mutex);
    MeanTable& slot = g_mean_cache[std::bit_cast<uint64_t>(par.p)];
    if (slot.values.size() < N + 1) slot = exact_mean_table(N, par);
    return slot;
}

// ---- distribution DP ------------------------------------------------------

namespace {

struct CdfTable {
    double p = 0.0;
    // cdf[n][k] = P(H_n <= k), each row extended until 1 - P <= 1e-15
    std::vector<std::vector<double>> cdf;
    std::vector<BinomialRow> rows;

    void ensure(uint32_t n_needed, const SplitParams& par) {
        if (n_needed < cdf.size()) return;
        const uint32_t n_old = static_cast<uint32_t>(cdf.size());
        const uint32_t n_new = n_needed + 1;
        cdf.resize(n_new);
        rows.resize(n_new);
        for (uint32_t n = n_old; n < n_new; ++n) rows[n] = binomial_row(n, par.p, par.q, 1e-22);
        // boundary rows
        if (n_new > 0 && cdf[0].empty()) cdf[0] = {1.0};
        if (n_new > 1 && cdf[1].empty()) cdf[1] = {1.0};
        // row-by-row fill; a row stops growing once its value passes 1 - 1e-15.
        // The j = n term of the convolution reads the row under construction
        // (entry k-1, already present); j = 0 is excluded since the silence
        // term q^n P(H_n <= k-1) covers it.
        for (uint32_t n = std::max<uint32_t>(n_old, 2); n < n_new; ++n) {
            std::vector<double>& out = cdf[n];
            out.clear();
            const double qn = std::exp(double(n) * std::log(par.q));
            const BinomialRow& row = rows[n];
            const uint32_t j_hi = static_cast<uint32_t>(std::min<uint64_t>(n, row.j_lo + row.w.size() - 1));
            for (int64_t k = 0;; ++k) {
                Kahan acc;
                for (uint32_t j = std::max<uint32_t>(row.j_lo, 1); j <= j_hi; ++j)
                    acc.add(row.at(j) * value(j, k - 1));
                acc.add(qn * (k == 0 ? 0.0 : out[k - 1]));
                const double v = std::min(acc.sum, 1.0);
                const double prev = out.empty() ? 0.0 : out.back();
                out.push_back(v);
                // stop at the cap, or when roundoff inherited from lower rows
                // makes the column stationary a few ulps below it; the v-gate
                // keeps flat leading columns of large-n rows from tripping it
                if (k >= 1 && (1.0 - v <= 1e-15 || (v >= 1.0 - 1e-6 && v - prev <= 4e-16))) break;
                if (k > 100000) throw NumericalError("exact_cdf_dp: cdf row failed to converge");
            }
        }
    }

    double value(uint32_t n, int64_t k) const {
        if (k < 0) return 0.0;
        if (n <= 1) return 1.0;
        const std::vector<double>& row = cdf[n];
        if (static_cast<uint64_t>(k) >= row.size()) return row.back();
        return row[k];
    }
};

std::mutex g_cdf_mutex;
std::map<uint64_t, CdfTable> g_cdf_cache;

}  // namespace

double exact_cdf_dp(uint32_t n, int64_t k, const SplitParams& par) {
    std::lock_guard<std::mutex> lock(g_cdf_mutex);
    CdfTable& t = g_cdf_cache[std::bit_cast<uint64_t>(par.p)];
    t.ensure(n, par);
    return t.value(n, k);
}

// ---- Poisson transform -----------------------------------------------------

namespace {

uint64_t series_length(double x) { return static_cast<uint64_t>(std::ceil(x + 12.0 * std::sqrt(x + 4.0) + 60.0)); }

}  // namespace

double poisson_transform_series(double x, const SplitParams& par, double tol) {
    if (!(x >= 0.0)) throw std::invalid_argument("poisson_transform_series: x must be >= 0");
    if (x == 0.0) return 0.0;
    const uint64_t N = series_length(x);
    const MeanTable& table = cached_mean_table(N, par);

    // term_n = E(H_n) x^n/n! e^{-x}, built iteratively
    double pois = std::exp(-x);  // n = 0 weight
    Kahan sum;
    for (uint64_t n = 1; n <= N; ++n) {
        pois *= x / double(n);
        if (n < 2) continue;
        sum.add(table.values[n] * pois);
        // E(H_m) <= E(H_2) m (checked numerically in the tests) gives the
        // remaining-series bound pois_n (n r/(1-r) + r/(1-r)^2) E(H_2)
        if (double(n) > 2.0 * x + 4.0) {
            const double r = x / double(n + 2);
            const double bound = table.values[2] * pois * (double(n) * r / (1 - r) + r / ((1 - r) * (1 - r)));
            if (bound < tol * sum.sum) break;
        }
    }
    return sum.sum;
}

namespace {

double fixpoint_rec(double u, const SplitParams& par, int depth, double x0,
                    std::map<uint64_t, double>& memo) {
    if (u < x0) return poisson_transform_series(u, par, 1e-14);
    if (depth <= 0) throw NumericalError("poisson_transform_fixpoint: depth exhausted before base threshold");
    const uint64_t key = std::bit_cast<uint64_t>(u);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const double f = 1.0 - (1.0 + u) * std::exp(-u);
    const double v =
        fixpoint_rec(par.p * u, par, depth - 1, x0, memo) +
        fixpoint_rec(par.q * u, par, depth - 1, x0, memo) * std::exp(-par.p * u) + f;
    memo.emplace(key, v);
    return v;
}

}  // namespace

double poisson_transform_fixpoint(double x, const SplitParams& par, int depth, double base_threshold) {
    if (!(x >= 0.0)) throw std::invalid_argument("poisson_transform_fixpoint: x must be >= 0");
    if (!(base_threshold > 0.0)) throw std::invalid_argument("poisson_transform_fixpoint: base threshold must be > 0");
    std::map<uint64_t, double> memo;
    return fixpoint_rec(x, par, depth, base_threshold, memo);
}

double poisson_mixture_cdf(double x, int64_t k, const SplitParams& par) {
    if (!(x >= 0.0)) throw std::invalid_argument("poisson_mixture_cdf: x must be >= 0");
    if (k < 0) return 0.0;
    const uint64_t N = series_length(x);
    double pois = std::exp(-x);
    Kahan sum;
    sum.add(pois);  // n = 0
    for (uint64_t n = 1; n <= N; ++n) {
        pois *= x / double(n);
        const double cdf = n <= 1 ? 1.0 : exact_cdf_dp(static_cast<uint32_t>(n), k, par);
        sum.add(pois * cdf);
    }
    return sum.sum;
}

}  // namespace leadel
