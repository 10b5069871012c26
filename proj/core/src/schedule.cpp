#include "sopsim/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sopsim/quadrature.hpp"

namespace sopsim {

const char* schedule_kind_name(schedule_kind k) {
    switch (k) {
        case schedule_kind::constant_rate: return "constant_rate";
        case schedule_kind::constant_s: return "constant_s";
        case schedule_kind::local_adiabatic: return "local_adiabatic";
        case schedule_kind::profile_driven: return "profile_driven";
        case schedule_kind::custom: return "custom";
    }
    return "unknown";
}

namespace {

// Fritsch-Carlson shape-preserving slopes: the interpolant is monotone on
// every interval where the data are.
std::vector<double> pchip_slopes(const std::vector<double>& t, const std::vector<double>& v) {
    const std::size_t n = t.size();
    std::vector<double> d(n, 0.0);
    if (n == 2) {
        d[0] = d[1] = (v[1] - v[0]) / (t[1] - t[0]);
        return d;
    }
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = t[i + 1] - t[i];
        delta[i] = (v[i + 1] - v[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0) return 0.0;
        if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return s;
    };
    d[0] = endpoint(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
}

bool annealing_kind(schedule_kind k) {
    return k == schedule_kind::constant_rate || k == schedule_kind::local_adiabatic ||
           k == schedule_kind::profile_driven;
}

double golden_minimize(const std::function<double(double)>& f, double a, double b, double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

schedule schedule::from_knots(std::vector<double> times, std::vector<double> values,
                              schedule_kind kind) {
    if (times.size() != values.size())
        fail(errc::bad_argument, "knot time and value counts differ");
    if (times.size() < 2) fail(errc::bad_argument, "a schedule needs at least two knots");
    for (double x : times)
        if (!std::isfinite(x)) fail(errc::bad_argument, "non-finite knot time");
    for (double& v : values) {
        if (!std::isfinite(v)) fail(errc::bad_argument, "non-finite knot value");
        if (v < -1e-12 || v > 1.0 + 1e-12)
            fail(errc::bad_argument, "knot value outside [0, 1]: " + std::to_string(v));
        v = std::clamp(v, 0.0, 1.0);
    }
    if (times.front() != 0.0) fail(errc::bad_argument, "schedule must start at t = 0");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i + 1] > times[i]))
            fail(errc::bad_argument, "knot times not strictly increasing at index " +
                                         std::to_string(i + 1));
    if (kind == schedule_kind::constant_s) {
        for (double v : values)
            if (v != values.front())
                fail(errc::bad_argument, "constant_s schedule with varying knot values");
    } else if (annealing_kind(kind)) {
        for (std::size_t i = 0; i + 1 < values.size(); ++i)
            if (values[i + 1] < values[i])
                fail(errc::bad_argument, "annealing schedule must have non-decreasing s");
        if (values.front() > 1e-9 || values.back() < 1.0 - 1e-9)
            fail(errc::bad_argument, "annealing schedule must run s from 0 to 1");
        values.front() = 0.0;
        values.back() = 1.0;
    }
    schedule sch;
    sch.kind_ = kind;
    sch.times_ = std::move(times);
    sch.values_ = std::move(values);
    sch.slopes_ = pchip_slopes(sch.times_, sch.values_);
    return sch;
}

std::size_t schedule::interval_of(double t) const {
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t idx = static_cast<std::size_t>(it - times_.begin());
    if (idx == 0) return 0;
    if (idx >= times_.size()) return times_.size() - 2;
    return idx - 1;
}

double schedule::s_at(double t) const {
    if (t <= times_.front()) return values_.front();
    if (t >= times_.back()) return values_.back();
    const std::size_t i = interval_of(t);
    const double h = times_[i + 1] - times_[i];
    const double x = (t - times_[i]) / h;
    const double x2 = x * x, x3 = x2 * x;
    const double val = values_[i] * (2.0 * x3 - 3.0 * x2 + 1.0) +
                       h * slopes_[i] * (x3 - 2.0 * x2 + x) +
                       values_[i + 1] * (-2.0 * x3 + 3.0 * x2) +
                       h * slopes_[i + 1] * (x3 - x2);
    return std::clamp(val, 0.0, 1.0);
}

double schedule::slope_at(double t) const {
    if (t < times_.front() || t > times_.back()) return 0.0;
    const std::size_t i = interval_of(t);
    const double h = times_[i + 1] - times_[i];
    const double x = (t - times_[i]) / h;
    const double x2 = x * x;
    return values_[i] * (6.0 * x2 - 6.0 * x) / h +
           slopes_[i] * (3.0 * x2 - 4.0 * x + 1.0) +
           values_[i + 1] * (6.0 * x - 6.0 * x2) / h +
           slopes_[i + 1] * (3.0 * x2 - 2.0 * x);
}

double schedule::t_of_s(double s) const {
    if (kind_ == schedule_kind::constant_s)
        fail(errc::bad_argument, "constant_s schedule has no s inverse");
    for (std::size_t i = 0; i + 1 < values_.size(); ++i)
        if (values_[i + 1] < values_[i])
            fail(errc::bad_argument, "schedule is not non-decreasing; no s inverse");
    if (s < values_.front() || s > values_.back())
        fail(errc::bad_argument, "s outside the schedule range");
    if (s <= values_.front()) return times_.front();
    if (s >= values_.back()) return times_.back();
    // Bisect on the interpolant itself so the round trip s_at(t_of_s(s)) = s
    // is exact to evaluation precision.
    double lo = times_.front(), hi = times_.back();
    for (int it = 0; it < 200 && hi - lo > 1e-16 * times_.back(); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (s_at(mid) < s) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

schedule constant_rate(double total_time) {
    if (!(total_time > 0.0)) fail(errc::bad_argument, "total time must be positive");
    return schedule::from_knots({0.0, total_time}, {0.0, 1.0}, schedule_kind::constant_rate);
}

schedule constant_s(double s_fixed, double total_time) {
    if (!(s_fixed > 0.0 && s_fixed < 1.0))
        fail(errc::bad_argument, "fixed s must lie strictly inside (0, 1)");
    if (!(total_time > 0.0)) fail(errc::bad_argument, "total time must be positive");
    return schedule::from_knots({0.0, total_time}, {s_fixed, s_fixed}, schedule_kind::constant_s);
}

schedule local_adiabatic(const std::function<double(double)>& gap_fn,
                         const std::function<double(double)>& v01_fn,
                         double epsilon, int grid, int knot_count) {
    if (!(epsilon > 0.0)) fail(errc::bad_argument, "epsilon must be positive");
    if (grid < 64) fail(errc::bad_argument, "grid must be at least 64");
    if (knot_count < 65) fail(errc::bad_argument, "knot count must be at least 65");

    auto inv_rate = [&](double s) {   // dt/ds
        const double g = gap_fn(s);
        if (!(g > 0.0))
            fail(errc::non_positive_gap, "gap not positive at s = " + std::to_string(s));
        const double v = v01_fn(s);
        if (!(v >= 0.0) || !std::isfinite(v))
            fail(errc::bad_argument, "matrix element invalid at s = " + std::to_string(s));
        return v / (epsilon * g * g);
    };

    // Locate the gap minimum; the time integrand peaks there and panels are
    // graded geometrically around it down to 1e-9 width.
    double best_s = 0.5, best_g = gap_fn(0.5);
    for (int i = 1; i < grid; ++i) {
        const double s = static_cast<double>(i) / grid;
        const double g = gap_fn(s);
        if (g < best_g) { best_g = g; best_s = s; }
    }
    const double cell = 1.0 / grid;
    const double s_star = golden_minimize(gap_fn, std::max(1e-9, best_s - cell),
                                          std::min(1.0 - 1e-9, best_s + cell), 1e-12);
    const double g_star = gap_fn(s_star);
    if (!(g_star > 0.0))
        fail(errc::non_positive_gap, "gap not positive at s = " + std::to_string(s_star));

    // The gap is a difference of eigenvalue-scale quantities, so evaluations
    // of v/(eps g^2) carry relative noise of order (solver floor)/gap. The
    // integration target must sit above that floor or the adaptive
    // subdivision chases noise forever on narrow avoided crossings.
    const double level_scale = std::max(gap_fn(1e-9), gap_fn(1.0 - 1e-9));
    const double noise_rel = 1e-15 * (level_scale / g_star + 1.0);
    const double rate_rel = std::clamp(500.0 * noise_rel, 1e-12, 1e-6);

    std::vector<double> edges;
    edges.reserve(static_cast<std::size_t>(grid) + 140);
    for (int i = 0; i <= grid; ++i) edges.push_back(static_cast<double>(i) / grid);
    for (double w = 1e-9; w < 1.0; w *= std::sqrt(2.0)) {
        const double a = s_star - w, b = s_star + w;
        if (a > 1e-12) edges.push_back(a);
        if (b < 1.0 - 1e-12) edges.push_back(b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return b - a < 1e-13; }),
                edges.end());
    edges.front() = 0.0;
    edges.back() = 1.0;

    const quadrature_options qo{1e-11, rate_rel, 48};
    std::vector<double> tcum(edges.size(), 0.0);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        tcum[i + 1] = tcum[i] + integrate(inv_rate, edges[i], edges[i + 1], qo);
    const double total = tcum.back();
    if (!std::isfinite(total) || !(total > 0.0))
        fail(errc::quadrature_failure, "schedule time integral not finite and positive");

    // Knots uniform in tau = t/T + s, which spends knots both across the
    // crossing (t varies) and along the flat stretches (s varies). Each knot
    // is placed on the curve by a Newton solve with bisection safeguarding.
    std::vector<double> kt, ks;
    kt.reserve(knot_count);
    ks.reserve(knot_count);
    kt.push_back(0.0);
    ks.push_back(0.0);
    std::vector<double> tau(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) tau[i] = tcum[i] / total + edges[i];
    std::size_t seg = 0;
    double base_s = 0.0, base_t = 0.0;
    for (int k = 1; k + 1 < knot_count; ++k) {
        const double target = 2.0 * k / (knot_count - 1);
        while (seg + 2 < edges.size() && tau[seg + 1] <= target) {
            ++seg;
            base_s = edges[seg];
            base_t = tcum[seg];
        }
        if (base_s < ks.back()) {  // previous knot advanced past this edge
            base_s = ks.back();
            base_t = kt.back();
        }
        double lo = base_s, hi = edges[seg + 1];
        double tau_lo = base_t / total + base_s;
        double s = lo + (hi - lo) * std::clamp((target - tau_lo) / (tau[seg + 1] - tau_lo),
                                               0.0, 1.0);
        double t_part = 0.0;
        for (int it = 0; it < 60; ++it) {
            s = std::clamp(s, lo, hi);
            t_part = integrate(inv_rate, base_s, s, qo);
            const double f = (base_t + t_part) / total + s - target;
            if (std::abs(f) < 1e-12) break;
            if (f < 0.0) lo = s; else hi = s;
            const double fp = inv_rate(s) / total + 1.0;
            double next = s - f / fp;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - s) < 1e-17) { s = next; break; }
            s = next;
        }
        const double t_knot = base_t + t_part;
        // keep interior knots strictly inside the closing (T, 1) knot
        if (t_knot > kt.back() && s >= ks.back() && t_knot < total && s < 1.0) {
            kt.push_back(t_knot);
            ks.push_back(s);
        }
    }
    kt.push_back(total);
    ks.push_back(1.0);
    return schedule::from_knots(std::move(kt), std::move(ks), schedule_kind::local_adiabatic);
}

probability_profile dj_reference_profile() {
    probability_profile prof;
    prof.p = [](double s) { return 0.5 * (1.0 + s * s * (6.0 + s * (-8.0 + 3.0 * s))); };
    prof.dp = [](double s) { const double r = 1.0 - s; return 6.0 * s * r * r; };
    return prof;
}

double dj_reference_tprime(double s) {
    if (!(s > 0.0 && s < 1.0))
        fail(errc::endpoint_singularity, "rate diverges at s = " + std::to_string(s));
    const double u = s * (1.0 - s);
    return 6.0 * std::sqrt(2.0) / std::sqrt(u * (4.0 - 9.0 * u));
}

schedule dj_reference_schedule(int knot_count) {
    if (knot_count < 17) fail(errc::bad_argument, "knot count must be at least 17");
    // In theta with s = sin^2(theta), dt = 12*sqrt(2)/sqrt(4 - 9 s(1-s)) dtheta:
    // the endpoint divergences cancel algebraically and the integrand is smooth.
    auto dens = [](double theta) {
        const double sn = std::sin(theta);
        const double u = sn * sn * (1.0 - sn * sn);
        return 12.0 * std::sqrt(2.0) / std::sqrt(4.0 - 9.0 * u);
    };
    const double half_pi = std::numbers::pi / 2.0;
    const quadrature_options qo{1e-13, 1e-13, 48};
    std::vector<double> kt(knot_count), ks(knot_count);
    kt[0] = 0.0;
    ks[0] = 0.0;
    for (int i = 1; i < knot_count; ++i) {
        const double th0 = half_pi * (i - 1) / (knot_count - 1);
        const double th1 = half_pi * i / (knot_count - 1);
        kt[i] = kt[i - 1] + integrate(dens, th0, th1, qo);
        const double sn = std::sin(th1);
        ks[i] = sn * sn;
    }
    ks[knot_count - 1] = 1.0;
    return schedule::from_knots(std::move(kt), std::move(ks), schedule_kind::profile_driven);
}

profile_path path_from_profile(const probability_profile& profile, int grid) {
    if (!profile.p || !profile.dp) fail(errc::bad_argument, "profile evaluators missing");
    if (grid < 64) fail(errc::bad_argument, "grid must be at least 64");
    const double p0 = profile.p(0.0), p1 = profile.p(1.0);
    if (std::abs(p0 - 0.5) > 1e-9 || std::abs(p1 - 1.0) > 1e-9)
        fail(errc::path_ill_defined, "profile must run from p(0) = 1/2 to p(1) = 1");

    auto p_fn = profile.p;
    auto dp_fn = profile.dp;
    auto num = [dp_fn](double u) { return u * dp_fn(u) / (1.0 - u); };
    const quadrature_options qo_m{1e-15, 1e-13, 48};

    // The discriminant p(1-p) - N^2 cancels almost totally at both ends, so
    // it is evaluated from quantities that are small where the cancellation
    // bites.  With m = int_0^s of the drive numerator and q = p - 1/2,
    //     disc = m(1-m) - q^2            (accurate for s <= 1/2)
    // and with rho = int_s^1 p' and nu = 1/2 - m,
    //     disc = rho(1-rho) - nu^2       (accurate for s > 1/2):
    // the two are algebraically identical to p(1-p) - N^2 but keep every
    // term on its own scale.  m rides a forward accumulator (m_base up to
    // s_base) and rho a backward one (rho_base down from s_rho), so only
    // short local increments are re-integrated as callers sweep s.
    auto rate_at = [p_fn, dp_fn, num, qo_m](double s, double m_base, double s_base,
                                            double rho_base, double s_rho) {
        if (!(s > 0.0 && s < 1.0))
            fail(errc::endpoint_singularity, "rate diverges at s = " + std::to_string(s));
        const double p = p_fn(s);
        if (!(p > 0.0 && p < 1.0))
            fail(errc::path_ill_defined, "profile leaves (0, 1) at s = " + std::to_string(s));
        const double dp = dp_fn(s);
        if (dp < 0.0)
            fail(errc::path_ill_defined, "profile decreasing at s = " + std::to_string(s));
        const double m = m_base + integrate(num, s_base, s, qo_m);
        double disc = 0.0;
        if (s <= 0.5) {
            const double q = p - 0.5;
            disc = m * (1.0 - m) - q * q;
        } else {
            const double rho = rho_base + integrate(dp_fn, s, s_rho, qo_m);
            const double nu = 0.5 - m;
            disc = rho * (1.0 - rho) - nu * nu;
        }
        if (!(disc > 0.0))
            fail(errc::path_ill_defined,
                 "path discriminant non-positive at s = " + std::to_string(s));
        const double tp = dp / ((1.0 - s) * std::sqrt(disc));
        if (!std::isfinite(tp))
            fail(errc::divergent_runtime, "rate not finite at s = " + std::to_string(s));
        return tp;
    };
    auto tprime = [rate_at](double s) { return rate_at(s, 0.0, 0.0, 0.0, 1.0); };

    // The evaluation still loses relative precision within ~1e-4 of the
    // endpoints (the discriminant itself vanishes cubically), so the
    // schedule integrates over a clamped domain and closes the two slivers
    // with their exact sqrt-law areas.
    const double s_lo = 1e-4, s_hi = 1.0 - 1e-4;
    const double th_lo = std::asin(std::sqrt(s_lo));
    const double th_hi = std::asin(std::sqrt(s_hi));
    const double tail_lo = 2.0 * s_lo * tprime(s_lo);
    const double tail_hi = 2.0 * (1.0 - s_hi) * tprime(s_hi);
    const quadrature_options qo{1e-12, 1e-12, 48};

    std::vector<double> edge_s(grid + 1);
    for (int i = 0; i <= grid; ++i) {
        const double th = th_lo + (th_hi - th_lo) * i / grid;
        const double sn = std::sin(th);
        edge_s[i] = sn * sn;
    }
    // Suffix integrals of p' down from 1 at every panel edge.
    std::vector<double> edge_rho(grid + 1);
    edge_rho[grid] = integrate(dp_fn, edge_s[grid], 1.0, qo_m);
    for (int i = grid; i-- > 0;)
        edge_rho[i] = edge_rho[i + 1] + integrate(dp_fn, edge_s[i], edge_s[i + 1], qo_m);

    std::vector<double> kt, ks;
    kt.reserve(grid + 3);
    ks.reserve(grid + 3);
    kt.push_back(0.0);
    ks.push_back(0.0);
    double acc = tail_lo;
    double m_edge = integrate(num, 0.0, s_lo, qo_m);
    kt.push_back(acc);
    ks.push_back(edge_s[0]);
    for (int i = 1; i <= grid; ++i) {
        const double th0 = th_lo + (th_hi - th_lo) * (i - 1) / grid;
        const double th1 = th_lo + (th_hi - th_lo) * i / grid;
        const double s0 = edge_s[i - 1];
        const double s1 = edge_s[i];
        const double rho1 = edge_rho[i];
        auto dens = [&rate_at, m_edge, s0, rho1, s1](double theta) {
            const double u = std::sin(theta);
            return rate_at(u * u, m_edge, s0, rho1, s1) * 2.0 * u * std::cos(theta);
        };
        acc += integrate(dens, th0, th1, qo);
        m_edge += integrate(num, s0, s1, qo_m);
        kt.push_back(acc);
        ks.push_back(s1);
    }
    kt.push_back(acc + tail_hi);
    ks.push_back(1.0);
    const double total = kt.back();
    if (!std::isfinite(total) || total > 1e12)
        fail(errc::divergent_runtime, "path runtime not finite");
    return profile_path{
        tprime,
        schedule::from_knots(std::move(kt), std::move(ks), schedule_kind::profile_driven)};
}

double runtime(const schedule& sched) { return sched.total_time(); }

double runtime(const std::function<double(double)>& tprime, double tail_floor) {
    if (!(tail_floor > 0.0 && tail_floor < 0.25))
        fail(errc::bad_argument, "tail floor must lie in (0, 0.25)");
    const double th_lo = std::asin(std::sqrt(tail_floor));
    const double th_hi = std::asin(std::sqrt(1.0 - tail_floor));
    auto dens = [&](double theta) {
        const double sn = std::sin(theta);
        return tprime(sn * sn) * 2.0 * sn * std::cos(theta);
    };
    // The callback receives s = sin^2(theta) and typically forms 1 - s by
    // cancellation, so near the right edge the integrand carries absolute
    // noise of order machine-eps / (1 - s).  That noise scales with panel
    // width exactly like the local target does, so a target below the floor
    // never terminates; keep the request comfortably above it.
    const quadrature_options qo{1e-8, 1e-10, 48};
    const double core = integrate(dens, th_lo, th_hi, qo);
    const double tails = 2.0 * tail_floor * (tprime(tail_floor) + tprime(1.0 - tail_floor));
    const double total = core + tails;
    if (!std::isfinite(total)) fail(errc::divergent_runtime, "runtime integral not finite");
    return total;
}

} // namespace sopsim
