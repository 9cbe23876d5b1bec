// Benchmark of the OpenMP kernels against the straight-line serial reference:
// hitting-time estimator, protocol simulation, conjecture moment, atom sums.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "leadel/exec.hpp"
#include "leadel/intervals.hpp"
#include "leadel/montecarlo.hpp"

using namespace leadel;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <class Fn>
void bench(const char* name, Fn&& fn) {
    const double t0 = now_s();
    const double serial = fn(Exec::Serial);
    const double t1 = now_s();
    const double parallel = fn(Exec::Parallel);
    const double t2 = now_s();
    printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   |serial-parallel| %.3e\n", name, t1 - t0,
           t2 - t1, (t1 - t0) / (t2 - t1), std::abs(serial - parallel));
}

}  // namespace

int main() {
#ifdef _OPENMP
    printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    printf("OpenMP not available; parallel mode runs the chunked kernel on one thread\n");
#endif

    const SplitParams half(0.5);
    const SplitParams biased(0.2);

    bench("mc_mean_cost_via_tau n=50", [&](Exec mode) { return mc_mean_cost_via_tau(50, half, 2000000, 42, kDefaultMaxSteps, mode).value; });
    bench("mc_protocol_mean n=50", [&](Exec mode) { return mc_protocol_mean(50, half, 500000, 42, kDefaultMaxSteps, mode).value; });
    bench("mc_conjecture x=0.5", [&](Exec mode) { return mc_conjecture_point(0.5, half, 2000000, 42, kDefaultMaxSteps, mode).mean_tau; });
    bench("mc_lemma_check p=0.2", [&](Exec mode) { return mc_lemma_check(0.3, 0.35, biased, 2000000, 42, kDefaultMaxSteps, mode).diff.value; });
    bench("poisson_cdf k=24", [&](Exec mode) { return poisson_cdf(3.0, 24, biased, mode); });
    bench("cdf_exact n=30 k=24", [&](Exec mode) { return cdf_exact(30, 24, biased, mode); });
    return 0;
}
