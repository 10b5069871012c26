#pragma once

#include <functional>
#include <vector>

#include "sopsim/errors.hpp"

namespace sopsim {

enum class schedule_kind { constant_rate, constant_s, local_adiabatic, profile_driven, custom };

const char* schedule_kind_name(schedule_kind k);

// Monotone map t -> s in [0,1], stored as knots with shape-preserving cubic
// interpolation in between. Knot times are strictly increasing from 0.
// Annealing kinds additionally run s from 0 to 1; constant_s is flat (its
// instantaneous end ramps carry no evolution time and are not represented);
// custom accepts any knot values in [0,1], including non-monotone ones, so
// reversed paths can be driven for consistency checks.
class schedule {
public:
    static schedule from_knots(std::vector<double> times, std::vector<double> values,
                               schedule_kind kind = schedule_kind::custom);

    double s_at(double t) const;
    double slope_at(double t) const;     // ds/dt of the interpolant
    double total_time() const { return times_.back(); }
    double t_of_s(double s) const;       // inverse; needs non-decreasing s
    schedule_kind kind() const { return kind_; }
    const std::vector<double>& knot_times() const { return times_; }
    const std::vector<double>& knot_values() const { return values_; }
    const std::vector<double>& knot_slopes() const { return slopes_; }

private:
    schedule() = default;
    std::size_t interval_of(double t) const;

    std::vector<double> times_, values_, slopes_;
    schedule_kind kind_ = schedule_kind::custom;
};

schedule constant_rate(double total_time);
schedule constant_s(double s_fixed, double total_time);

// Schedule obeying |ds/dt| = epsilon * gap^2 / v01 pointwise, built by
// integrating the inverse rate with panels graded around the gap minimum.
// Knot density is chosen so the interpolated rate never exceeds the local
// bound by more than ~1e-7 at the knots.
schedule local_adiabatic(const std::function<double(double)>& gap_fn,
                         const std::function<double(double)>& v01_fn,
                         double epsilon, int grid = 512, int knot_count = 4097);

// Target probability for the lowest-value class as a function of s, with
// derivative. Must satisfy p(0) = 1/2, p(1) = 1, and stay inside (0,1).
struct probability_profile {
    std::function<double(double)> p;
    std::function<double(double)> dp;
};

probability_profile dj_reference_profile();   // p(s) = (1 + 6s^2 - 8s^3 + 3s^4)/2
double dj_reference_tprime(double s);          // 6*sqrt(2)/sqrt(s(1-s)(4-9s(1-s)))
schedule dj_reference_schedule(int knot_count = 2049);

struct profile_path {
    std::function<double(double)> tprime;      // dt/ds on (0,1)
    schedule path;
};

/// Reverse-engineer a deterministic two-class path from a probability profile:
// t'(s) = p' / ((1-s) * sqrt(p(1-p) - N^2)) with
// N(s) = 1/2 - integral_0^s u p'(u)/(1-u) du.
profile_path path_from_profile(const probability_profile& profile, int grid = 1024);

double runtime(const schedule& sched);
// Total time of a t'(s) evaluator with inverse-sqrt endpoint divergences.
// The quadrature substitutes s = sin^2(theta) and closes the last
// [0, tail_floor] slivers with the exact sqrt-law area 2*s*t'(s); the
// evaluator must be stable down to tail_floor.
double runtime(const std::function<double(double)>& tprime, double tail_floor = 1e-7);

} // namespace sopsim
