#pragma once

#include <cstdint>
#include <vector>

#include "sopsim/dynamics.hpp"
#include "sopsim/schedule.hpp"
#include "sopsim/spectrum.hpp"

namespace sopsim {

// ---------------------------------------------------------------------------
// Function-class discrimination (two anneals, second on the complement).
// ---------------------------------------------------------------------------

enum class dj_outcome { balanced_function, constant_function };

const char* dj_outcome_name(dj_outcome o);

struct dj_verdict {
    // Energy read out after annealing on the oracle itself, then on its
    // complement. A zero says "the annealed state sits on the all-agree
    // class"; the pair (0, 0) certifies balanced, one zero certifies
    // constant, and (nonzero, nonzero) breaks the promise.
    double run1_energy = 0.0;
    double run2_energy = 0.0;
    dj_outcome outcome = dj_outcome::balanced_function;
};

// Decides whether a 0/1-valued oracle table (length 2^n) is balanced or
// constant using two anneals driven by the closed-form optimal schedule.
// Deterministic readout is used when the final state concentrates to
// within 1e-6 of a single class; otherwise one projective sample is drawn
// with the given seed (sampled_readout forces the latter).
// Oracle tables that are neither balanced nor constant fail with
// errc::promise_violation, as does an inconsistent energy pair.
dj_verdict run_deutsch_josza(const std::vector<double>& oracle, std::uint64_t seed,
                             bool sampled_readout = false);

// ---------------------------------------------------------------------------
// Ladder spectrum with binomial weights (n levels, scaling benchmark).
// ---------------------------------------------------------------------------

struct rem_result {
    int n = 0;
    double epsilon = 0.0;
    double total_time = 0.0;
    double epsilon_t = 0.0;          // epsilon * total_time
    double ground_probability = 0.0; // NaN when dynamics are skipped
    double min_gap = 0.0;
    double s_star = 0.0;
    double max_v01 = 0.0;
};

// Builds the n-level ladder spectrum, synthesizes the gap-tracking schedule
// at rate parameter epsilon, and (optionally) integrates the reduced
// dynamics over it. grid controls the schedule synthesis resolution.
rem_result run_rem(int n, double epsilon, int grid = 512, bool with_dynamics = true);

// Sweeps n over [n_lo, n_hi] in steps; dynamics default off because the
// runtime scaling only needs the synthesized schedule length.
std::vector<rem_result> rem_sweep(int n_lo, int n_hi, int step, double epsilon = 1.0,
                                  int grid = 512, bool with_dynamics = false);

// ---------------------------------------------------------------------------
// Single-marked-class search (two-level spectrum).
// ---------------------------------------------------------------------------

enum class grover_schedule_kind {
    locally_adiabatic, // rate tracks the local gap
    bound_rate         // constant rate sized from the worst-case bound
};

struct grover_result {
    int n = 0;
    std::uint64_t marked = 1;
    double epsilon = 0.0;
    grover_schedule_kind kind = grover_schedule_kind::locally_adiabatic;
    double total_time = 0.0;
    double epsilon_t = 0.0;
    double ground_probability = 0.0; // NaN when dynamics are skipped
    double min_gap = 0.0;
    double s_star = 0.0;
    double max_v01 = 0.0;
};

grover_result run_grover(int n, std::uint64_t marked, double epsilon,
                         grover_schedule_kind kind = grover_schedule_kind::locally_adiabatic,
                         bool with_dynamics = true, int grid = 512);

std::vector<grover_result> grover_sweep(int n_lo, int n_hi, int step, double epsilon = 1.0,
                                        grover_schedule_kind kind =
                                            grover_schedule_kind::locally_adiabatic,
                                        int grid = 512);

// ---------------------------------------------------------------------------
// Runtime-scaling fits.
// ---------------------------------------------------------------------------

enum class scaling_model {
    log2_t_vs_n,  // fit log2(value) against n; slope 1/2 means sqrt(2^n)
    logt_vs_logn  // fit ln(value) against n ln 2; slope is the exponent of 2^n
};

struct scaling_point {
    double n = 0.0;
    double value = 0.0;
};

struct scaling_report {
    std::vector<scaling_point> points;
    scaling_model model = scaling_model::log2_t_vs_n;
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
};

// Least-squares line through the transformed points; fewer than four points
// or a degenerate abscissa fail with errc::degenerate_fit.
scaling_report fit_scaling(const std::vector<scaling_point>& points, scaling_model model);

} // namespace sopsim
