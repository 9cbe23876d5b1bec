#include "leadel/intervals.hpp"

#include <cmath>
#include <functional>

#include "leadel/exec.hpp"

namespace leadel {

namespace {

void check_level(uint32_t k, uint32_t cap, const char* what) {
    if (k > cap)
        throw std::invalid_argument(std::string(what) + ": level " + std::to_string(k) + " exceeds cap " +
                                    std::to_string(cap) + " (2^k blow-up)");
}

// In-order scan of the level-k atoms as (length, 1 - right). Tracking the
// complement of the right endpoint keeps atoms near 1 cancellation-free and
// makes the rightmost endpoint exactly 1. Left child: (p*len, omr + q*len);
// right child: (q*len, omr).
template <class Fn>
void scan_subtree(uint32_t depth, double len, double omr, double p, double q, Fn&& fn) {
    if (depth == 0) {
        fn(len, omr);
        return;
    }
    scan_subtree(depth - 1, p * len, omr + q * len, p, q, fn);
    scan_subtree(depth - 1, q * len, omr, p, q, fn);
}

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

// Deterministic reduction of term(len, omr) over all atoms of level k.
// Parallel mode splits the tree at a fixed depth and merges subtree sums in
// order, so thread count never changes the result.
template <class Term>
double atom_reduce(uint32_t k, const SplitParams& par, Exec mode, Term&& term) {
    const double p = par.p, q = par.q;
    if (mode == Exec::Serial || k == 0) {
        Kahan acc;
        scan_subtree(k, 1.0, 0.0, p, q, [&](double len, double omr) { acc.add(term(len, omr)); });
        return acc.sum + acc.c;
    }

    const uint32_t split = k < 8 ? k : 8;
    const int64_t n_sub = int64_t(1) << split;
    std::vector<Kahan> partial(static_cast<size_t>(n_sub));

#pragma omp parallel for schedule(dynamic, 4)
    for (int64_t s = 0; s < n_sub; ++s) {
        // state of prefix node s, applying digits most-significant first —
        // the same operations the full scan would perform on this path
        double len = 1.0, omr = 0.0;
        for (int32_t d = int32_t(split) - 1; d >= 0; --d) {
            if ((s >> d) & 1) {
                len = q * len;
            } else {
                omr = omr + q * len;
                len = p * len;
            }
        }
        Kahan& acc = partial[static_cast<size_t>(s)];
        scan_subtree(k - split, len, omr, p, q, [&](double l, double o) { acc.add(term(l, o)); });
    }

    Kahan total;
    for (const Kahan& part : partial) {
        total.add(part.sum);
        total.add(part.c);
    }
    return total.sum + total.c;
}

}  // namespace

IntervalDecomposition build_intervals(uint32_t k, const SplitParams& par) {
    check_level(k, kLevelCap, "build_intervals");
    IntervalDecomposition out;
    out.level = k;
    const size_t n = size_t(1) << k;
    out.rights.reserve(n);
    out.lengths.reserve(n);
    scan_subtree(k, 1.0, 0.0, par.p, par.q, [&](double len, double omr) {
        out.lengths.push_back(len);
        out.rights.push_back(1.0 - omr);
    });
    return out;
}

IntervalDecomposition refine_intervals(const IntervalDecomposition& parent, const SplitParams& par) {
    check_level(parent.level + 1, kLevelCap, "refine_intervals");
    IntervalDecomposition out;
    out.level = parent.level + 1;
    const size_t n = parent.lengths.size();
    out.lengths.reserve(2 * n);
    out.rights.reserve(2 * n);
    // literal recursion: each interval starts at the previous right extremity
    // and has length p_{digit} * |parent|
    double right = 0.0;
    for (size_t j = 0; j < n; ++j) {
        const double left_len = par.p * parent.lengths[j];
        const double right_len = par.q * parent.lengths[j];
        right += left_len;
        out.lengths.push_back(left_len);
        out.rights.push_back(right);
        right += right_len;
        out.lengths.push_back(right_len);
        out.rights.push_back(right);
    }
    return out;
}

double interval_length_by_digits(uint32_t k, uint64_t index, const SplitParams& par) {
    check_level(k, kStreamingLevelCap, "interval_length_by_digits");
    if (k < 64 && index >= (uint64_t(1) << k)) throw std::invalid_argument("interval_length_by_digits: index out of range");
    double len = 1.0;
    for (uint32_t i = 0; i < k; ++i) len *= ((index >> i) & 1) ? par.q : par.p;
    return len;
}

DiscreteMeasure measure(uint32_t k, const SplitParams& par) {
    check_level(k, kLevelCap, "measure");
    DiscreteMeasure m;
    m.atoms.reserve(size_t(1) << k);
    scan_subtree(k, 1.0, 0.0, par.p, par.q,
                 [&](double len, double omr) { m.atoms.push_back({len, 1.0 - omr}); });
    return m;
}

double cdf_exact(uint32_t n, uint32_t k, const SplitParams& par, Exec mode) {
    if (n < 2) throw std::invalid_argument("cdf_exact: n must be >= 2");
    check_level(k, kStreamingLevelCap, "cdf_exact");
    const double nm1 = double(n) - 1.0;
    const double s =
        atom_reduce(k, par, mode, [nm1](double len, double omr) { return len * std::pow(omr, nm1); });
    return double(n) * s;
}

double poisson_cdf(double x, uint32_t k, const SplitParams& par, Exec mode) {
    if (!(x >= 0.0)) throw std::invalid_argument("poisson_cdf: x must be >= 0");
    check_level(k, kStreamingLevelCap, "poisson_cdf");
    const double s =
        atom_reduce(k, par, mode, [x](double len, double omr) { return len * std::exp(-x * (1.0 - omr)); });
    return std::exp(-x) + x * s;
}

double tail_approx(uint32_t n, uint32_t k, const SplitParams& par, Exec mode) {
    if (n < 2) throw std::invalid_argument("tail_approx: n must be >= 2");
    check_level(k, kStreamingLevelCap, "tail_approx");
    const double nd = double(n);
    return atom_reduce(k, par, mode, [nd](double len, double omr) {
        const double r = 1.0 - omr;
        return len * (1.0 - std::pow(omr, nd) - nd * r * std::pow(omr, nd - 1.0));
    });
}

}  // namespace leadel
