#include "sopsim/quadrature.hpp"

#include <cmath>

namespace sopsim {

namespace {

struct simpson_state {
    const std::function<double(double)>* f;
    double abs_tol;
    double rel_tol;
};

double recurse(const simpson_state& st, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = (*st.f)(lm);
    const double frm = (*st.f)(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm))
        fail(errc::quadrature_failure, "integrand not finite inside panel");
    const double h6 = (b - a) / 12.0;
    const double left = h6 * (fa + 4.0 * flm + fm);
    const double right = h6 * (fm + 4.0 * frm + fb);
    const double s2 = left + right;
    const double err = s2 - whole;
    const double target = 15.0 * std::max(tol, st.rel_tol * std::abs(s2));
    if (std::abs(err) <= target) return s2 + err / 15.0;
    if (depth <= 0)
        fail(errc::quadrature_failure, "adaptive subdivision depth exhausted");
    return recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const quadrature_options& opt) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fm = f(0.5 * (a + b));
    const double fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb))
        fail(errc::quadrature_failure, "integrand not finite at panel nodes");
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_state st{&f, opt.abs_tol, opt.rel_tol};
    return recurse(st, a, b, fa, fm, fb, whole, opt.abs_tol, opt.max_depth);
}

double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& edges,
                        const quadrature_options& opt) {
    if (edges.size() < 2) fail(errc::bad_argument, "panel list needs at least two edges");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        acc += integrate(f, edges[i], edges[i + 1], opt);
    return acc;
}

} // namespace sopsim
