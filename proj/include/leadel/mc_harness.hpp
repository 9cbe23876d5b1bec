#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "leadel/exec.hpp"
#include "leadel/montecarlo.hpp"
#include "leadel/rng.hpp"

namespace leadel::mc {

struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    void merge(const Kahan& o) {
        add(o.sum);
        add(o.c);
    }
    double get() const { return sum + c; }
};

struct MeanAcc {
    Kahan sum;
    Kahan sumsq;
    uint64_t count = 0;
    uint64_t truncated = 0;
    uint64_t overflow = 0;

    void add(double v) {
        sum.add(v);
        sumsq.add(v * v);
        ++count;
    }
    void merge(const MeanAcc& o) {
        sum.merge(o.sum);
        sumsq.merge(o.sumsq);
        count += o.count;
        truncated += o.truncated;
        overflow += o.overflow;
    }
    Estimate finish(uint64_t trials, uint64_t seed) const {
        Estimate e;
        e.trials = trials;
        e.truncated_count = truncated;
        e.overflow_count = overflow;
        e.seed = seed;
        if (count > 0) {
            e.value = sum.get() / double(count);
            if (count > 1) {
                const double var =
                    std::max(0.0, (sumsq.get() - double(count) * e.value * e.value) / double(count - 1));
                e.std_err = std::sqrt(var / double(count));
            }
        }
        return e;
    }
};

// Runs body(rng, acc) once per trial with the trial's own stream. Serial mode
// is the straight-line reference; Parallel mode reduces over a fixed chunk
// grid in chunk order, so its result does not depend on the worker count.
template <class Acc, class Body>
Acc run_trials(uint64_t trials, uint64_t seed, Exec mode, Body&& body) {
    if (mode == Exec::Serial || trials <= 1) {
        Acc acc;
        for (uint64_t t = 0; t < trials; ++t) {
            Rng rng = Rng::for_trial(seed, t);
            body(rng, acc);
        }
        return acc;
    }

    const uint64_t n_chunks = std::min<uint64_t>(trials, 1024);
    std::vector<Acc> partial(n_chunks);

#pragma omp parallel for schedule(dynamic)
    for (int64_t c = 0; c < int64_t(n_chunks); ++c) {
        const uint64_t lo = trials * uint64_t(c) / n_chunks;
        const uint64_t hi = trials * uint64_t(c + 1) / n_chunks;
        Acc& acc = partial[size_t(c)];
        for (uint64_t t = lo; t < hi; ++t) {
            Rng rng = Rng::for_trial(seed, t);
            body(rng, acc);
        }
    }

    Acc total;
    for (const Acc& part : partial) total.merge(part);
    return total;
}

// Mean of fn(rng) over `trials` independent streams.
template <class Fn>
Estimate mc_mean(uint64_t trials, uint64_t seed, Exec mode, Fn&& fn) {
    MeanAcc acc = run_trials<MeanAcc>(trials, seed, mode, [&](Rng& rng, MeanAcc& a) { a.add(fn(rng)); });
    return acc.finish(trials, seed);
}

}  // namespace leadel::mc
