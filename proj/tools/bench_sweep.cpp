// serial vs OpenMP timing of the sweep kernels

#include <chrono>
#include <cstdio>

#include "ptcirc/analysis.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace ptcirc;

namespace {

template <class Fn>
double time_ms(Fn fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main() {
    const double c = 0.33473;
    const double gamma_l = 0.0738;

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    {
        const auto grid = uniform_grid(0.01, 2.5, 20000);
        SweepResult a, b;
        const double ts = time_ms([&] {
            a = sweep_gamma_serial(c, gamma_l, grid, SweepSource::DirectEigen);
        });
        const double tp = time_ms([&] {
            b = sweep_gamma(c, gamma_l, grid, SweepSource::DirectEigen);
        });
        std::printf("direct eigen, %zu points: serial %.1f ms, parallel %.1f ms, "
                    "speedup %.2fx\n",
                    grid.size(), ts, tp, ts / tp);
    }

    {
        const auto grid = uniform_grid(0.06, 0.28, 48);
        SweepOptions opt;
        opt.integrator.t_end = 200.0;
        SweepResult a, b;
        const double ts = time_ms([&] {
            a = sweep_gamma_serial(c, gamma_l, grid, SweepSource::TimeDomain, opt);
        });
        const double tp = time_ms([&] {
            b = sweep_gamma(c, gamma_l, grid, SweepSource::TimeDomain, opt);
        });
        std::printf("time domain, %zu points: serial %.1f ms, parallel %.1f ms, "
                    "speedup %.2fx\n",
                    grid.size(), ts, tp, ts / tp);
    }
    return 0;
}
