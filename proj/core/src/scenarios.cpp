#include "sopsim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sopsim/effective.hpp"

namespace sopsim {

namespace {

constexpr double kReadoutConcentration = 1e-6;
constexpr double kZeroEnergyTol = 1e-6;

// Scenario runs integrate tighter than the library default so the recorded
// norm drift stays well under the 1e-9 reporting line even for long anneals.
integrator_options scenario_options() {
    integrator_options opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-14;
    return opt;
}

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

// Class counts of a 0/1 table turned into a two-value (or one-value)
// spectrum with unit driver scale.
spectrum_spec spectrum_from_table(const std::vector<double>& oracle) {
    if (oracle.size() < 2 || !is_power_of_two(oracle.size()))
        fail(errc::bad_argument, "oracle table length must be a power of two, at least 2");
    int n = 0;
    while ((std::size_t{1} << n) < oracle.size()) ++n;

    std::size_t ones = 0;
    for (double v : oracle) {
        if (v != 0.0 && v != 1.0)
            fail(errc::bad_argument, "oracle table entries must be exactly 0 or 1");
        if (v == 1.0) ++ones;
    }
    const std::size_t zeros = oracle.size() - ones;

    spectrum_spec spec;
    spec.n = n;
    spec.driver_scale = 1.0;
    if (zeros > 0) {
        spec.values.push_back(0.0);
        spec.multiplicities.emplace_back(static_cast<unsigned long>(zeros));
    }
    if (ones > 0) {
        spec.values.push_back(1.0);
        spec.multiplicities.emplace_back(static_cast<unsigned long>(ones));
    }
    return spec;
}

// The discrimination schedule is fixed once per process: the closed-form
// optimal path for the balanced two-class problem.
const schedule& discrimination_schedule() {
    static const schedule sched = path_from_profile(dj_reference_profile()).path;
    return sched;
}

// Final energy after annealing the given spectrum along the discrimination
// schedule. Reads out deterministically when the state has concentrated on
// one class; otherwise draws one projective sample.
double anneal_energy(const spectrum_spec& spec, std::uint64_t seed, bool sampled_readout) {
    const validated_spectrum vs = validate_spectrum(spec);
    if (vs.size() == 1) {
        // Single-class tables never move: the readout is the class value.
        return vs.offset() + vs.value(0);
    }
    const reduced_trajectory traj = integrate_reduced(vs, discrimination_schedule(),
                                                      scenario_options());
    const trajectory_sample& last = traj.samples.back();
    const auto peak = std::max_element(last.class_probabilities.begin(),
                                       last.class_probabilities.end());
    const std::size_t peak_j =
        static_cast<std::size_t>(peak - last.class_probabilities.begin());
    if (!sampled_readout && *peak >= 1.0 - kReadoutConcentration)
        return vs.offset() + vs.value(peak_j);
    reduced_state final_state;
    final_state.amplitudes = last.amplitudes;
    final_state.time = last.t;
    return measure(vs, final_state, seed).energy;
}

double scan_max_v01(const validated_spectrum& vs) {
    double best = 0.0;
    for (int i = 1; i <= 99; ++i) {
        const double s = 0.01 * i;
        best = std::max(best, spectral_at(vs, s).v01);
    }
    return best;
}

} // namespace

const char* dj_outcome_name(dj_outcome o) {
    return o == dj_outcome::balanced_function ? "balanced" : "constant";
}

dj_verdict run_deutsch_josza(const std::vector<double>& oracle, std::uint64_t seed,
                             bool sampled_readout) {
    const spectrum_spec direct = spectrum_from_table(oracle);

    dj_verdict v;
    v.run1_energy = anneal_energy(direct, seed, sampled_readout);
    v.run2_energy = anneal_energy(complement_spectrum(direct), seed + 1, sampled_readout);

    const bool zero1 = std::abs(v.run1_energy) <= kZeroEnergyTol;
    const bool zero2 = std::abs(v.run2_energy) <= kZeroEnergyTol;
    if (zero1 && zero2) {
        v.outcome = dj_outcome::balanced_function;
    } else if (zero1 || zero2) {
        v.outcome = dj_outcome::constant_function;
    } else {
        fail(errc::promise_violation,
             "neither anneal reached the all-agree class; the table is neither "
             "balanced nor constant");
    }
    return v;
}

namespace {

struct synthesized_run {
    schedule sched;
    double min_gap;
    double s_star;
    double max_v01;
};

// Gap and coupling evaluators ride the secular solver, which stays cheap for
// wide spectra; s is kept strictly inside (0,1) where the two lowest roots
// are simple.
synthesized_run synthesize_tracking_schedule(const validated_spectrum& vs, double epsilon,
                                             int grid) {
    auto clamp_s = [](double s) { return std::clamp(s, 1e-9, 1.0 - 1e-9); };
    auto gap_fn = [&vs, clamp_s](double s) {
        const auto lo = secular_lowest(vs, clamp_s(s), 2);
        return lo[1] - lo[0];
    };
    auto v01_fn = [&vs, clamp_s](double s) {
        const double sc = clamp_s(s);
        const auto lo = secular_lowest(vs, sc, 2);
        const auto u = secular_vector(vs, sc, lo[0]);
        const auto w = secular_vector(vs, sc, lo[1]);
        return matrix_element(vs, u, w);
    };

    synthesized_run run{local_adiabatic(gap_fn, v01_fn, epsilon, grid), 0.0, 0.0, 0.0};
    const rem_gap_min m = min_gap_numeric(vs);
    run.min_gap = m.gap;
    run.s_star = m.s_star;
    run.max_v01 = scan_max_v01(vs);
    return run;
}

} // namespace

rem_result run_rem(int n, double epsilon, int grid, bool with_dynamics) {
    if (n < 2) fail(errc::bad_argument, "ladder spectrum needs n >= 2");
    if (!(epsilon > 0.0)) fail(errc::bad_argument, "rate parameter must be positive");
    const validated_spectrum vs = validate_spectrum(rem_spectrum(n));
    const synthesized_run run = synthesize_tracking_schedule(vs, epsilon, grid);

    rem_result out;
    out.n = n;
    out.epsilon = epsilon;
    out.total_time = run.sched.total_time();
    out.epsilon_t = epsilon * out.total_time;
    out.min_gap = run.min_gap;
    out.s_star = run.s_star;
    out.max_v01 = run.max_v01;
    out.ground_probability = std::numeric_limits<double>::quiet_NaN();
    if (with_dynamics) {
        const reduced_trajectory traj = integrate_reduced(vs, run.sched, scenario_options());
        out.ground_probability = ground_probability(traj);
    }
    return out;
}

std::vector<rem_result> rem_sweep(int n_lo, int n_hi, int step, double epsilon, int grid,
                                  bool with_dynamics) {
    if (step <= 0 || n_hi < n_lo) fail(errc::bad_argument, "bad sweep range");
    std::vector<rem_result> out;
    for (int n = n_lo; n <= n_hi; n += step)
        out.push_back(run_rem(n, epsilon, grid, with_dynamics));
    return out;
}

grover_result run_grover(int n, std::uint64_t marked, double epsilon,
                         grover_schedule_kind kind, bool with_dynamics, int grid) {
    if (!(epsilon > 0.0)) fail(errc::bad_argument, "rate parameter must be positive");
    const validated_spectrum vs = validate_spectrum(grover_spectrum(n, marked));

    grover_result out;
    out.n = n;
    out.marked = marked;
    out.epsilon = epsilon;
    out.kind = kind;
    out.ground_probability = std::numeric_limits<double>::quiet_NaN();

    schedule sched = constant_rate(1.0);
    if (kind == grover_schedule_kind::locally_adiabatic) {
        const synthesized_run run = synthesize_tracking_schedule(vs, epsilon, grid);
        sched = run.sched;
        out.min_gap = run.min_gap;
        out.s_star = run.s_star;
        out.max_v01 = run.max_v01;
    } else {
        const rem_gap_min m = min_gap_numeric(vs);
        out.min_gap = m.gap;
        out.s_star = m.s_star;
        out.max_v01 = scan_max_v01(vs);
        // Worst-case sizing: hold the rate that would be allowed at the
        // narrowest point over the whole sweep.
        const double total = out.max_v01 / (epsilon * m.gap * m.gap);
        sched = constant_rate(total);
    }
    out.total_time = sched.total_time();
    out.epsilon_t = epsilon * out.total_time;
    if (with_dynamics) {
        const reduced_trajectory traj = integrate_reduced(vs, sched, scenario_options());
        out.ground_probability = ground_probability(traj);
    }
    return out;
}

std::vector<grover_result> grover_sweep(int n_lo, int n_hi, int step, double epsilon,
                                        grover_schedule_kind kind, int grid) {
    if (step <= 0 || n_hi < n_lo) fail(errc::bad_argument, "bad sweep range");
    std::vector<grover_result> out;
    for (int n = n_lo; n <= n_hi; n += step)
        out.push_back(run_grover(n, 1, epsilon, kind, /*with_dynamics=*/false, grid));
    return out;
}

scaling_report fit_scaling(const std::vector<scaling_point>& points, scaling_model model) {
    if (points.size() < 4)
        fail(errc::degenerate_fit, "scaling fit needs at least four points");

    scaling_report rep;
    rep.points = points;
    rep.model = model;

    std::vector<double> xs(points.size()), ys(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].value > 0.0))
            fail(errc::degenerate_fit, "scaling fit needs positive values");
        if (model == scaling_model::log2_t_vs_n) {
            xs[i] = points[i].n;
            ys[i] = std::log2(points[i].value);
        } else {
            xs[i] = points[i].n * std::log(2.0);
            ys[i] = std::log(points[i].value);
        }
    }

    const double count = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) fail(errc::degenerate_fit, "all abscissae coincide");

    rep.slope = sxy / sxx;
    rep.intercept = my - rep.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (rep.intercept + rep.slope * xs[i]);
        rss += r * r;
    }
    rep.residual_rms = std::sqrt(rss / count);
    return rep;
}

} // namespace sopsim
