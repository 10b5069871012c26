#include "sopsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sopsim {

namespace {

using cvec = std::vector<std::complex<double>>;

// Dormand-Prince 4(5) embedded pair.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

template <typename Rhs>
void rk4_step(const Rhs& rhs, double t, double h, cvec& y, cvec work[5]) {
    const std::size_t n = y.size();
    cvec& k1 = work[0];
    cvec& k2 = work[1];
    cvec& k3 = work[2];
    cvec& k4 = work[3];
    cvec& tmp = work[4];
    rhs(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(t + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

// Integrates y' = rhs(t, y) from 0 to T, stopping exactly at each sample
// time; on_sample(t, y) fires there. Throws on step-size collapse or (in
// adaptive mode) when the embedded error cannot meet the tolerances.
// Returns the number of accepted steps, which scales the norm-drift guard:
// each accepted step may dissipate up to ~rel_tol of norm, so a flat
// multiple of rel_tol would misfire on long runs.
template <typename Rhs, typename OnSample>
std::size_t drive(const Rhs& rhs, cvec y, double total, const integrator_options& opt,
                  const std::vector<double>& sample_times, const OnSample& on_sample) {
    const std::size_t n = y.size();
    cvec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
    double t = 0.0;
    std::size_t next = 0;
    if (!sample_times.empty() && sample_times[0] <= 0.0) {
        on_sample(0.0, y);
        next = 1;
    }

    std::size_t accepted = 0;
    if (opt.fixed_steps > 0) {
        cvec work[5] = {cvec(n), cvec(n), cvec(n), cvec(n), cvec(n)};
        // March over the union of the uniform base grid and the sample
        // times; everything is deterministic for reproducible reruns.
        std::vector<double> stops;
        stops.reserve(static_cast<std::size_t>(opt.fixed_steps) + sample_times.size() + 1);
        for (int i = 1; i <= opt.fixed_steps; ++i)
            stops.push_back(total * i / opt.fixed_steps);
        stops.insert(stops.end(), sample_times.begin(), sample_times.end());
        stops.push_back(total);
        std::sort(stops.begin(), stops.end());
        for (double stop : stops) {
            if (stop <= t || stop > total) continue;
            rk4_step(rhs, t, stop - t, y, work);
            ++accepted;
            t = stop;
            while (next < sample_times.size() && sample_times[next] <= t + 1e-13 * total) {
                on_sample(sample_times[next], y);
                ++next;
            }
        }
        return accepted;
    }

    const double hmin = 1e-14 * total;
    double h = total / 1024.0;
    int consecutive_rejects = 0;
    while (t < total) {
        double stop = total;
        if (next < sample_times.size()) stop = std::min(stop, sample_times[next]);
        if (h > stop - t) h = stop - t;
        if (h < hmin && stop - t > hmin)
            fail(errc::step_size_underflow,
                 "step collapsed at t = " + std::to_string(t));

        rhs(t, y, k1);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (A21 * k1[i]);
        rhs(t + C2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        rhs(t + C3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        rhs(t + C4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        rhs(t + C5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] +
                      h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        rhs(t + h, ynew, k7);

        double err_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::complex<double> e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            const double scale =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double r = std::abs(e) / scale;
            err_sq += r * r;
        }
        const double err = std::sqrt(err_sq / n);

        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            ++accepted;
            consecutive_rejects = 0;
            while (next < sample_times.size() && sample_times[next] <= t + 1e-13 * total) {
                on_sample(sample_times[next], y);
                ++next;
            }
            const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (++consecutive_rejects > 60)
                fail(errc::tolerance_not_met,
                     "error estimate will not settle at t = " + std::to_string(t));
        }
    }
    return accepted;
}

// Largest norm drift the adaptive pair can legitimately accumulate: each
// accepted step contributes up to ~rel_tol (one-sided, since the stability
// function is strictly contractive on the imaginary axis), with a floor for
// very short runs.
double drift_budget(const integrator_options& opt, std::size_t accepted_steps) {
    return 10.0 * opt.rel_tol * static_cast<double>(std::max<std::size_t>(accepted_steps, 10));
}

std::vector<double> sample_grid(double total, int count) {
    std::vector<double> ts;
    if (count < 2) {
        ts = {0.0, total};
        return ts;
    }
    ts.reserve(count);
    for (int i = 0; i < count; ++i) ts.push_back(total * i / (count - 1));
    ts.back() = total;
    return ts;
}

} // namespace

reduced_state initial_reduced(const validated_spectrum& vs) {
    reduced_state st;
    st.amplitudes.assign(vs.size(), {1.0, 0.0});
    st.time = 0.0;
    return st;
}

double weighted_norm(const validated_spectrum& vs, const cvec& c) {
    double acc = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) acc += vs.eta()[j] * std::norm(c[j]);
    return std::sqrt(acc);
}

reduced_trajectory integrate_reduced(const validated_spectrum& vs, const schedule& sched,
                                     const integrator_options& opt,
                                     const std::optional<reduced_state>& initial) {
    const std::size_t k1 = vs.size();
    const double total = sched.total_time();
    const double f_mid = 0.5 * (vs.value(0) + vs.value(k1 - 1));
    const double e0 = vs.driver_scale();
    const auto& eta = vs.eta();

    // State: k1 centered amplitudes plus one slot accumulating S = int s dt,
    // which restores the centering phase exactly at sample times.
    cvec y(k1 + 1, {1.0, 0.0});
    y[k1] = 0.0;
    if (initial) {
        if (initial->amplitudes.size() != k1)
            fail(errc::bad_argument, "initial state dimension mismatch");
        for (std::size_t j = 0; j < k1; ++j) y[j] = initial->amplitudes[j];
    }

    auto rhs = [&](double t, const cvec& a, cvec& dy) {
        const double s = sched.s_at(t);
        std::complex<double> w{0.0, 0.0};
        for (std::size_t j = 0; j < k1; ++j) w += eta[j] * a[j];
        const std::complex<double> drive = std::complex<double>(0.0, 1.0) * ((1.0 - s) * e0 * w);
        for (std::size_t j = 0; j < k1; ++j) {
            const double omega = s * (vs.value(j) - f_mid);
            dy[j] = drive - std::complex<double>(0.0, omega) * a[j];
        }
        dy[k1] = s;
    };

    reduced_trajectory traj;
    const auto times = sample_grid(total, opt.sample_count);
    traj.samples.reserve(times.size());
    double max_drift = 0.0;
    auto on_sample = [&](double t, const cvec& state) {
        trajectory_sample smp;
        smp.t = t;
        smp.s = sched.s_at(t);
        const double big_s = state[k1].real();
        const std::complex<double> phase = std::exp(std::complex<double>(0.0, -f_mid * big_s));
        smp.amplitudes.resize(k1);
        smp.class_probabilities.resize(k1);
        for (std::size_t j = 0; j < k1; ++j) {
            smp.amplitudes[j] = state[j] * phase;
            smp.class_probabilities[j] = eta[j] * std::norm(state[j]);
        }
        smp.weighted_norm = weighted_norm(vs, smp.amplitudes);
        max_drift = std::max(max_drift, std::abs(smp.weighted_norm - 1.0));
        traj.samples.push_back(std::move(smp));
    };

    const std::size_t steps = drive(rhs, std::move(y), total, opt, times, on_sample);
    traj.max_norm_drift = max_drift;
    if (opt.fixed_steps == 0 && max_drift > drift_budget(opt, steps))
        fail(errc::tolerance_not_met,
             "weighted norm drifted by " + std::to_string(max_drift));
    return traj;
}

full_state integrate_full(const scrambled_diagonal& diag, double driver_scale,
                          const schedule& sched, const integrator_options& opt,
                          const std::optional<full_state>& initial) {
    const std::size_t dim = diag.entries.size();
    if (dim == 0 || dim > (std::size_t{1} << scramble_default_cap))
        fail(errc::dimension_too_large, "full evolution dimension out of range");
    const double total = sched.total_time();
    const double inv_dim = 1.0 / static_cast<double>(dim);

    cvec y(dim, {std::sqrt(inv_dim), 0.0});
    if (initial) {
        if (initial->amplitudes.size() != dim)
            fail(errc::bad_argument, "initial state dimension mismatch");
        y = initial->amplitudes;
    }

    auto rhs = [&](double t, const cvec& psi, cvec& dy) {
        const double s = sched.s_at(t);
        std::complex<double> sum{0.0, 0.0};
        for (const auto& a : psi) sum += a;
        const std::complex<double> lift = (1.0 - s) * driver_scale * inv_dim * sum;
        const std::complex<double> mi{0.0, -1.0};
        for (std::size_t i = 0; i < dim; ++i)
            dy[i] = mi * (s * diag.entries[i] * psi[i] - lift);
    };

    full_state out;
    double max_drift = 0.0;
    auto on_sample = [&](double t, const cvec& state) {
        double norm_sq = 0.0;
        for (const auto& a : state) norm_sq += std::norm(a);
        max_drift = std::max(max_drift, std::abs(std::sqrt(norm_sq) - 1.0));
        out.amplitudes = state;
        out.time = t;
    };

    // Samples at quarter points keep a drift record without bulk copies.
    std::vector<double> times{0.0, 0.25 * total, 0.5 * total, 0.75 * total, total};
    const std::size_t steps = drive(rhs, std::move(y), total, opt, times, on_sample);
    out.max_norm_drift = max_drift;
    if (opt.fixed_steps == 0 && max_drift > drift_budget(opt, steps))
        fail(errc::tolerance_not_met,
             "state norm drifted by " + std::to_string(max_drift));
    return out;
}

class_aggregate aggregate_full_to_reduced(const full_state& full,
                                          const scrambled_diagonal& diag) {
    const std::size_t dim = diag.entries.size();
    if (full.amplitudes.size() != dim)
        fail(errc::bad_argument, "state and diagonal dimensions differ");
    const std::size_t k1 = diag.values.size();
    std::vector<std::complex<double>> sums(k1, {0.0, 0.0});
    std::vector<std::size_t> counts(k1, 0);
    for (std::size_t i = 0; i < dim; ++i) {
        const auto j = static_cast<std::size_t>(diag.class_of[i]);
        sums[j] += full.amplitudes[i];
        ++counts[j];
    }
    class_aggregate agg;
    agg.state.time = full.time;
    agg.state.amplitudes.resize(k1);
    agg.class_probabilities.resize(k1);
    const double root_dim = std::sqrt(static_cast<double>(dim));
    double spread = 0.0;
    for (std::size_t j = 0; j < k1; ++j) {
        const auto mean = sums[j] / static_cast<double>(counts[j]);
        // c_j = sqrt(N) * mean, equivalently sum / (sqrt(eta_j) sqrt(m_j))
        agg.state.amplitudes[j] = root_dim * mean;
        agg.class_probabilities[j] =
            (static_cast<double>(counts[j]) / dim) * std::norm(agg.state.amplitudes[j]);
    }
    for (std::size_t i = 0; i < dim; ++i) {
        const auto j = static_cast<std::size_t>(diag.class_of[i]);
        spread = std::max(spread,
                          std::abs(full.amplitudes[i] - sums[j] / static_cast<double>(counts[j])));
    }
    agg.max_spread = spread;
    return agg;
}

double ground_probability(const reduced_trajectory& traj) {
    if (traj.samples.empty()) fail(errc::bad_argument, "empty trajectory");
    return traj.samples.back().class_probabilities.front();
}

namespace {

std::size_t draw_index(const std::vector<double>& weights, std::uint64_t seed) {
    double total = 0.0;
    for (double w : weights) total += w;
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, total);
    const double u = unif(gen);
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

} // namespace

measurement measure(const full_state& state, const scrambled_diagonal& diag,
                    std::uint64_t seed) {
    if (state.amplitudes.size() != diag.entries.size())
        fail(errc::bad_argument, "state and diagonal dimensions differ");
    std::vector<double> w(state.amplitudes.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::norm(state.amplitudes[i]);
    const std::size_t idx = draw_index(w, seed);
    return {static_cast<std::int64_t>(idx), diag.entries[idx]};
}

measurement measure(const validated_spectrum& vs, const reduced_state& state,
                    std::uint64_t seed) {
    if (state.amplitudes.size() != vs.size())
        fail(errc::bad_argument, "state and spectrum dimensions differ");
    std::vector<double> w(vs.size());
    for (std::size_t j = 0; j < w.size(); ++j)
        w[j] = vs.eta()[j] * std::norm(state.amplitudes[j]);
    const std::size_t idx = draw_index(w, seed);
    return {static_cast<std::int64_t>(idx), vs.offset() + vs.value(idx)};
}

} // namespace sopsim
