// Microbenchmarks for the hot paths: the two spectral routes, the reduced
// integrator step, the brute-force full-register step, and rate-budget
// schedule synthesis.
#include <benchmark/benchmark.h>

#include <algorithm>
#include <cstdint>

#include "sopsim/dynamics.hpp"
#include "sopsim/effective.hpp"
#include "sopsim/schedule.hpp"
#include "sopsim/spectrum.hpp"

namespace {

sopsim::validated_spectrum rem(int n) {
    return sopsim::validate_spectrum(sopsim::rem_spectrum(n));
}

// ---------------------------------------------------------------------------
// Spectral routes.  The dense symmetric eigensolve and the secular-equation
// bisection are independent implementations of the same spectrum; both are
// timed over the class count so the crossover is visible.

void bm_dense_eigensolve(benchmark::State& state) {
    const auto vs = rem(static_cast<int>(state.range(0)));
    double s = 0.3;
    for (auto _ : state) {
        const auto sd = sopsim::eigensystem(vs, s);
        benchmark::DoNotOptimize(sd.gap);
        s = (s < 0.9) ? s + 1e-6 : 0.3;   // defeat caching without moving the regime
    }
}
BENCHMARK(bm_dense_eigensolve)->Arg(8)->Arg(16)->Arg(32)->Arg(63)->Unit(benchmark::kMicrosecond);

void bm_secular_two_lowest(benchmark::State& state) {
    const auto vs = rem(static_cast<int>(state.range(0)));
    double s = 0.3;
    for (auto _ : state) {
        const auto lo = sopsim::secular_lowest(vs, s, 2);
        benchmark::DoNotOptimize(lo[1] - lo[0]);
        s = (s < 0.9) ? s + 1e-6 : 0.3;
    }
}
BENCHMARK(bm_secular_two_lowest)->Arg(8)->Arg(16)->Arg(32)->Arg(63)->Arg(127)->Unit(benchmark::kMicrosecond);

void bm_secular_coupling(benchmark::State& state) {
    const auto vs = rem(static_cast<int>(state.range(0)));
    double s = 0.3;
    for (auto _ : state) {
        const auto lo = sopsim::secular_lowest(vs, s, 2);
        const auto u = sopsim::secular_vector(vs, s, lo[0]);
        const auto w = sopsim::secular_vector(vs, s, lo[1]);
        benchmark::DoNotOptimize(sopsim::matrix_element(vs, u, w));
        s = (s < 0.9) ? s + 1e-6 : 0.3;
    }
}
BENCHMARK(bm_secular_coupling)->Arg(16)->Arg(63)->Arg(127)->Unit(benchmark::kMicrosecond);

// ---------------------------------------------------------------------------
// Reduced dynamics.  Fixed-step mode isolates the per-step derivative cost
// (O(class count) work per stage) from adaptive step-size control.

void bm_reduced_fixed_steps(benchmark::State& state) {
    const auto vs = rem(static_cast<int>(state.range(0)));
    const auto sched = sopsim::constant_rate(5.0);
    sopsim::integrator_options opt;
    opt.fixed_steps = 4096;
    opt.sample_count = 2;
    for (auto _ : state) {
        const auto traj = sopsim::integrate_reduced(vs, sched, opt);
        benchmark::DoNotOptimize(sopsim::ground_probability(traj));
    }
    state.SetItemsProcessed(state.iterations() * opt.fixed_steps);
}
BENCHMARK(bm_reduced_fixed_steps)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void bm_reduced_adaptive(benchmark::State& state) {
    const auto vs = rem(static_cast<int>(state.range(0)));
    const auto sched = sopsim::constant_rate(5.0);
    sopsim::integrator_options opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-12;
    opt.sample_count = 2;
    for (auto _ : state) {
        const auto traj = sopsim::integrate_reduced(vs, sched, opt);
        benchmark::DoNotOptimize(sopsim::ground_probability(traj));
    }
}
BENCHMARK(bm_reduced_adaptive)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

// ---------------------------------------------------------------------------
// Brute-force register evolution.  Cost per step is O(2^n); items processed
// counts amplitude updates so the rate stays comparable across sizes.

void bm_full_register_fixed_steps(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto vs = rem(n);
    const auto diag = sopsim::scramble(vs, 1);
    const auto sched = sopsim::constant_rate(5.0);
    sopsim::integrator_options opt;
    opt.fixed_steps = 64;
    opt.sample_count = 2;
    for (auto _ : state) {
        const auto fs = sopsim::integrate_full(diag, static_cast<double>(n), sched, opt);
        benchmark::DoNotOptimize(fs.amplitudes[0]);
    }
    state.SetItemsProcessed(state.iterations() * opt.fixed_steps *
                            (std::int64_t{1} << n));
}
BENCHMARK(bm_full_register_fixed_steps)->Arg(8)->Arg(10)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);

// ---------------------------------------------------------------------------
// Schedule synthesis: graded-panel integration of v01/(eps*gap^2) with
// secular-route callbacks, the setup cost of every gap-tracking run.

void bm_local_adiabatic_synthesis(benchmark::State& state) {
    const auto vs = rem(static_cast<int>(state.range(0)));
    auto clamp_s = [](double s) { return std::clamp(s, 1e-9, 1.0 - 1e-9); };
    auto gap_fn = [&vs, clamp_s](double s) {
        const auto lo = sopsim::secular_lowest(vs, clamp_s(s), 2);
        return lo[1] - lo[0];
    };
    auto v01_fn = [&vs, clamp_s](double s) {
        const double sc = clamp_s(s);
        const auto lo = sopsim::secular_lowest(vs, sc, 2);
        const auto u = sopsim::secular_vector(vs, sc, lo[0]);
        const auto w = sopsim::secular_vector(vs, sc, lo[1]);
        return sopsim::matrix_element(vs, u, w);
    };
    for (auto _ : state) {
        const auto sched = sopsim::local_adiabatic(gap_fn, v01_fn, 1.0, 256, 1025);
        benchmark::DoNotOptimize(sched.total_time());
    }
}
BENCHMARK(bm_local_adiabatic_synthesis)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
