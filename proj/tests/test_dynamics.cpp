#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "sopsim/dynamics.hpp"
#include "sopsim/schedule.hpp"
#include "sopsim/spectrum.hpp"

using namespace sopsim;

namespace {

integrator_options tight() {
    integrator_options opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-14;
    return opt;
}

} // namespace

TEST_CASE("frozen two-class evolution matches the closed-form law") {
    // At fixed s = 1/2 with equal halves, the ground-class probability is
    // p0(t) = (1 + sin^2(sqrt(2) t / 4)) / 2.
    const auto vs = validate_spectrum(dj_spectrum(4, dj_kind::balanced));
    auto opt = tight();
    opt.sample_count = 129;
    const double T = std::sqrt(2.0) * M_PI;
    const auto traj = integrate_reduced(vs, constant_s(0.5, T), opt);
    REQUIRE(traj.samples.size() == 129);
    for (const auto& sample : traj.samples) {
        const double arg = std::sin(std::sqrt(2.0) * sample.t / 4.0);
        const double law = 0.5 * (1.0 + arg * arg);
        CHECK(std::abs(sample.class_probabilities[0] - law) <= 1e-9);
        CHECK(std::abs(sample.weighted_norm - 1.0) <= 1e-9);
    }
    CHECK(ground_probability(traj) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sampling grid is uniform and complete") {
    const auto vs = validate_spectrum(rem_spectrum(8));
    integrator_options opt = tight();
    opt.sample_count = 33;
    const auto sched = constant_rate(4.0);
    const auto traj = integrate_reduced(vs, sched, opt);
    REQUIRE(traj.samples.size() == 33);
    CHECK(traj.samples.front().t == 0.0);
    CHECK(traj.samples.back().t == doctest::Approx(4.0).epsilon(1e-15));
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        CHECK(traj.samples[i].t == doctest::Approx(4.0 * i / 32.0).epsilon(1e-13));
        CHECK(traj.samples[i].s ==
              doctest::Approx(sched.s_at(traj.samples[i].t)).epsilon(1e-13));
        REQUIRE(traj.samples[i].class_probabilities.size() == vs.size());
    }
    // probabilities sum to the squared weighted norm
    const auto& last = traj.samples.back();
    double sum = 0.0;
    for (double p : last.class_probabilities) sum += p;
    CHECK(sum == doctest::Approx(last.weighted_norm * last.weighted_norm).epsilon(1e-13));
}

TEST_CASE("fixed-step and adaptive integrators agree") {
    const auto vs = validate_spectrum(rem_spectrum(10));
    const auto sched = constant_rate(6.0);
    auto adaptive = tight();
    integrator_options fixed = adaptive;
    fixed.fixed_steps = 20000;
    const auto ta = integrate_reduced(vs, sched, adaptive);
    const auto tf = integrate_reduced(vs, sched, fixed);
    REQUIRE(ta.samples.size() == tf.samples.size());
    double max_dp = 0.0;
    for (std::size_t i = 0; i < ta.samples.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j)
            max_dp = std::max(max_dp, std::abs(ta.samples[i].class_probabilities[j] -
                                               tf.samples[i].class_probabilities[j]));
    CHECK(max_dp <= 1e-8);
    CHECK(ta.max_norm_drift <= 1e-9);
}

TEST_CASE("classic fixed-step mode converges at fourth order") {
    const auto vs = validate_spectrum(dj_spectrum(4, dj_kind::balanced));
    const auto sched = constant_s(0.5, 3.0);
    auto reference = tight();
    reference.rel_tol = 1e-13;
    reference.sample_count = 2;
    const double exact = integrate_reduced(vs, sched, reference)
                             .samples.back()
                             .class_probabilities[0];
    // endpoint-only sampling keeps the step sizes exactly uniform, so the
    // halving ratio reflects the method order alone
    auto coarse = reference;
    coarse.fixed_steps = 200;
    auto fine = reference;
    fine.fixed_steps = 400;
    const double e1 = std::abs(integrate_reduced(vs, sched, coarse)
                                   .samples.back()
                                   .class_probabilities[0] -
                               exact);
    const double e2 = std::abs(integrate_reduced(vs, sched, fine)
                                   .samples.back()
                                   .class_probabilities[0] -
                               exact);
    CHECK(e1 / std::max(e2, 1e-300) > 8.0);
}

TEST_CASE("running a schedule backwards undoes the evolution") {
    const auto vs = validate_spectrum(rem_spectrum(8));
    const auto sched = dj_reference_schedule(513);
    auto opt = tight();
    opt.sample_count = 2;
    const auto fwd = integrate_reduced(vs, sched, opt);
    const auto& final_amp = fwd.samples.back().amplitudes;

    // reversed knots give s_r(t) = s(T - t); conjugating the state maps the
    // forward evolution onto this reversed schedule
    const auto& kt = sched.knot_times();
    const auto& kv = sched.knot_values();
    const double T = sched.total_time();
    std::vector<double> rt(kt.size()), rv(kv.size());
    for (std::size_t i = 0; i < kt.size(); ++i) {
        rt[i] = T - kt[kt.size() - 1 - i];
        rv[i] = kv[kv.size() - 1 - i];
    }
    rt.front() = 0.0;
    const auto rev = schedule::from_knots(rt, rv, schedule_kind::custom);

    reduced_state start;
    start.amplitudes.resize(final_amp.size());
    for (std::size_t j = 0; j < final_amp.size(); ++j)
        start.amplitudes[j] = std::conj(final_amp[j]);
    const auto back = integrate_reduced(vs, rev, opt, start);
    for (const auto& amp : back.samples.back().amplitudes) {
        CHECK(std::abs(amp.real() - 1.0) <= 1e-8);
        CHECK(std::abs(amp.imag()) <= 1e-8);
    }
}

TEST_CASE("brute-force route agrees with the reduced route") {
    auto spec = rem_spectrum(6);
    spec.offset = -2.0;   // exercises the pure-phase role of the shift
    const auto vs = validate_spectrum(spec);
    const auto sched = constant_rate(5.0);
    auto opt = tight();
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-13;

    const auto reduced = integrate_reduced(vs, sched, opt);
    const auto diag = scramble(vs, 3);
    const auto full = integrate_full(diag, vs.driver_scale(), sched, opt);
    const auto agg = aggregate_full_to_reduced(full, diag);

    REQUIRE(agg.state.amplitudes.size() == vs.size());
    const auto& rfinal = reduced.samples.back().amplitudes;
    double dev = 0.0;
    for (std::size_t j = 0; j < vs.size(); ++j)
        dev = std::max(dev, std::abs(std::abs(agg.state.amplitudes[j]) -
                                     std::abs(rfinal[j])));
    CHECK(dev <= 1e-8);
    CHECK(agg.max_spread <= 1e-10);
    CHECK(full.max_norm_drift <= 1e-8);
}

TEST_CASE("norm drift stays within the adaptive budget") {
    const auto vs = validate_spectrum(rem_spectrum(12));
    integrator_options opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-12;
    const auto traj = integrate_reduced(vs, constant_rate(20.0), opt);
    CHECK(traj.max_norm_drift <= 1e-6);
}

TEST_CASE("measurement is seeded and consistent with the class weights") {
    const auto vs = validate_spectrum(dj_spectrum(4, dj_kind::balanced));
    reduced_state uniform = initial_reduced(vs);
    const auto m1 = measure(vs, uniform, 99);
    const auto m2 = measure(vs, uniform, 99);
    CHECK(m1.index == m2.index);
    CHECK(m1.energy == m2.energy);
    CHECK((m1.energy == 0.0 || m1.energy == 1.0));

    int zeros = 0;
    const int draws = 4000;
    for (int k = 0; k < draws; ++k)
        if (measure(vs, uniform, 1000 + k).index == 0) ++zeros;
    CHECK(zeros > draws / 2 - 200);
    CHECK(zeros < draws / 2 + 200);
}

TEST_CASE("measured energy includes the diagonal shift") {
    auto spec = dj_spectrum(3, dj_kind::constant0);
    spec.offset = 2.5;
    const auto vs = validate_spectrum(spec);
    const auto m = measure(vs, initial_reduced(vs), 1);
    CHECK(m.index == 0);
    CHECK(m.energy == doctest::Approx(2.5).epsilon(1e-15));

    const auto diag = scramble(vs, 5);
    full_state fs;
    fs.amplitudes.assign(8, std::complex<double>(1.0 / std::sqrt(8.0), 0.0));
    const auto mf = measure(fs, diag, 7);
    CHECK(mf.energy == doctest::Approx(2.5).epsilon(1e-15));
}
