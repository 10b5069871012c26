#include "sopsim/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace sopsim {

effective_hamiltonian build_effective(const validated_spectrum& vs, double s) {
    if (!(s >= 0.0 && s <= 1.0)) fail(errc::bad_argument, "s must lie in [0, 1]");
    effective_hamiltonian h;
    h.s = s;
    h.rank1_weight = (1.0 - s) * vs.driver_scale();
    h.diag.resize(vs.size());
    h.v.resize(vs.size());
    for (std::size_t j = 0; j < vs.size(); ++j) {
        h.diag[j] = s * vs.value(j);
        h.v[j] = std::sqrt(vs.eta()[j]);
    }
    return h;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

void finish(const validated_spectrum& vs, spectral_data& out) {
    const std::size_t k1 = out.eigenvalues.size();
    if (k1 < 2) {
        out.degenerate_ground = true;
        out.gap = 0.0;
        out.v01 = 0.0;
        return;
    }
    out.gap = out.eigenvalues[1] - out.eigenvalues[0];
    const double width = out.eigenvalues.back() - out.eigenvalues.front();
    out.degenerate_ground = out.gap < 1e-12 * std::max(width, 1.0);
    out.v01 = matrix_element(vs, out.ground, out.excited);
}

} // namespace

spectral_data eigensystem(const validated_spectrum& vs, double s) {
    const std::size_t k1 = vs.size();
    if (k1 > dense_eigensolver_cap)
        fail(errc::bad_argument, "dense eigensolve capped at " +
                                     std::to_string(dense_eigensolver_cap) + " classes");
    const effective_hamiltonian h = build_effective(vs, s);
    Eigen::MatrixXd m(k1, k1);
    for (std::size_t i = 0; i < k1; ++i)
        for (std::size_t j = 0; j < k1; ++j)
            m(i, j) = (i == j ? h.diag[i] : 0.0) - h.rank1_weight * h.v[i] * h.v[j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
        fail(errc::bracketing_failure, "dense eigensolver did not converge");
    spectral_data out;
    out.s = s;
    out.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + k1);
    out.ground.resize(k1);
    for (std::size_t i = 0; i < k1; ++i) out.ground[i] = solver.eigenvectors()(i, 0);
    if (k1 >= 2) {
        out.excited.resize(k1);
        for (std::size_t i = 0; i < k1; ++i) out.excited[i] = solver.eigenvectors()(i, 1);
    }
    finish(vs, out);
    return out;
}

namespace {

struct secular_ctx {
    const std::vector<double>* diag;   // s f_j
    const std::vector<double>* eta;
    double rho;                        // (1-s) E0
};

// phi(lambda) = sum rho eta_k / (d_k - lambda) - 1; strictly increasing
// between consecutive poles.
double phi(const secular_ctx& c, double lam) {
    double acc = -1.0;
    for (std::size_t k = 0; k < c.diag->size(); ++k)
        acc += c.rho * (*c.eta)[k] / ((*c.diag)[k] - lam);
    return acc;
}

double phi_prime(const secular_ctx& c, double lam) {
    double acc = 0.0;
    for (std::size_t k = 0; k < c.diag->size(); ++k) {
        const double d = (*c.diag)[k] - lam;
        acc += c.rho * (*c.eta)[k] / (d * d);
    }
    return acc;
}

// Root in (lo, hi) where phi(lo) < 0 < phi(hi); phi is monotone here.
double bisect_newton(const secular_ctx& c, double lo, double hi) {
    double flo = phi(c, lo);
    double fhi = phi(c, hi);
    if (flo > 0.0 || fhi < 0.0)
        fail(errc::bracketing_failure, "secular bracket lost its sign change");
    for (int it = 0; it < 200 && hi - lo > 4e-16 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = phi(c, mid);
        if (fm < 0.0) { lo = mid; flo = fm; } else { hi = mid; fhi = fm; }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 6; ++it) {
        const double f = phi(c, x);
        const double fp = phi_prime(c, x);
        if (fp <= 0.0) break;
        double nx = x - f / fp;
        if (nx <= lo || nx >= hi) break;
        if (std::abs(nx - x) < 1e-18 * std::max(1.0, std::abs(x))) { x = nx; break; }
        x = nx;
    }
    return x;
}

// When the root hugs a pole closer than the bracket offset, a one-term
// residue expansion around the pole is more accurate than bisection.
double pole_hug(const secular_ctx& c, std::size_t pole, double side) {
    const double d = (*c.diag)[pole];
    double rest = -1.0;
    for (std::size_t k = 0; k < c.diag->size(); ++k)
        if (k != pole) rest += c.rho * (*c.eta)[k] / ((*c.diag)[k] - d);
    // rho*eta_p/(d - lam) = 1 - rest  =>  lam = d - rho*eta_p/(1 - rest)
    const double denom = -rest;
    if (denom * side <= 0.0)
        fail(errc::bracketing_failure, "secular root escaped its interlacing interval");
    return d - c.rho * (*c.eta)[pole] / denom;
}

std::vector<double> secular_solve(const validated_spectrum& vs, double s, std::size_t count) {
    const std::size_t k1 = vs.size();
    count = std::min(count, k1);
    const effective_hamiltonian h = build_effective(vs, s);
    std::vector<double> roots;
    roots.reserve(count);
    if (s >= 1.0) {
        for (std::size_t j = 0; j < count; ++j) roots.push_back(h.diag[j]);
        return roots;
    }
    if (s <= 0.0) {
        // Driver alone: one state at -E0, a (K)-fold level at 0.
        roots.push_back(-vs.driver_scale());
        for (std::size_t j = 1; j < count; ++j) roots.push_back(0.0);
        return roots;
    }
    secular_ctx c{&h.diag, &vs.eta(), h.rank1_weight};
    double scale = std::abs(h.diag.back());
    for (double d : h.diag) scale = std::max(scale, std::abs(d));
    const double off = 1e-14 * std::max(scale, 1.0);
    for (std::size_t j = 0; j < count; ++j) {
        const double hi_pole = h.diag[j];
        const double lo = (j == 0) ? hi_pole - c.rho - off : h.diag[j - 1] + off;
        const double hi = hi_pole - off;
        double root;
        if (lo >= hi || phi(c, hi) < 0.0) {
            root = pole_hug(c, j, +1.0);          // root within off of the pole above
        } else if (j > 0 && phi(c, lo) > 0.0) {
            root = pole_hug(c, j - 1, -1.0);      // root within off of the pole below
        } else {
            root = bisect_newton(c, lo, hi);
        }
        roots.push_back(root);
    }
    return roots;
}

} // namespace

std::vector<double> secular_roots(const validated_spectrum& vs, double s) {
    return secular_solve(vs, s, vs.size());
}

std::vector<double> secular_lowest(const validated_spectrum& vs, double s, std::size_t count) {
    return secular_solve(vs, s, count);
}

std::vector<double> secular_vector(const validated_spectrum& vs, double s, double lambda) {
    const effective_hamiltonian h = build_effective(vs, s);
    std::vector<double> b(vs.size());
    double norm2 = 0.0;
    for (std::size_t j = 0; j < vs.size(); ++j) {
        const double d = h.diag[j] - lambda;
        if (d == 0.0) {
            // Exact pole hit: the eigenvector collapses onto this class.
            std::fill(b.begin(), b.end(), 0.0);
            b[j] = 1.0;
            return b;
        }
        b[j] = h.v[j] / d;
        norm2 += b[j] * b[j];
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : b) x *= inv;
    return b;
}

spectral_data spectral_at(const validated_spectrum& vs, double s) {
    if (vs.size() <= dense_eigensolver_cap && s > 0.0 && s < 1.0)
        return eigensystem(vs, s);
    spectral_data out;
    out.s = s;
    const std::size_t k1 = vs.size();
    if (k1 == 1) {
        out.eigenvalues = secular_solve(vs, s, 1);
        out.ground = {1.0};
        finish(vs, out);
        return out;
    }
    const std::size_t want = std::min<std::size_t>(3, k1);
    out.eigenvalues = secular_solve(vs, s, want);
    if (s >= 1.0) {
        out.ground.assign(k1, 0.0);
        out.ground[0] = 1.0;
        out.excited.assign(k1, 0.0);
        out.excited[1] = 1.0;
    } else if (s <= 0.0) {
        out.ground.resize(k1);
        for (std::size_t j = 0; j < k1; ++j) out.ground[j] = std::sqrt(vs.eta()[j]);
        // any unit vector orthogonal to v spans the degenerate level; pick one
        out.excited.assign(k1, 0.0);
        const double a = out.ground[0], b = out.ground[1];
        const double nrm = std::hypot(a, b);
        out.excited[0] = -b / nrm;
        out.excited[1] = a / nrm;
    } else {
        out.ground = secular_vector(vs, s, out.eigenvalues[0]);
        out.excited = secular_vector(vs, s, out.eigenvalues[1]);
    }
    finish(vs, out);
    return out;
}

double matrix_element(const validated_spectrum& vs, const std::vector<double>& u,
                      const std::vector<double>& w) {
    // dH/ds = diag(f) + E0 vv^T
    double diag_part = 0.0;
    for (std::size_t j = 0; j < vs.size(); ++j) diag_part += vs.value(j) * u[j] * w[j];
    std::vector<double> v(vs.size());
    for (std::size_t j = 0; j < vs.size(); ++j) v[j] = std::sqrt(vs.eta()[j]);
    const double rank1 = vs.driver_scale() * dot(v, u) * dot(v, w);
    return std::abs(diag_part + rank1);
}

double rem_gap_asymptotic(int n, double s) {
    if (n < 2) fail(errc::bad_argument, "asymptotic gap needs n >= 2");
    if (!(s >= 0.0 && s <= 1.0)) fail(errc::bad_argument, "s must lie in [0, 1]");
    const double nn = n;
    const double k1 = 2.0 * nn / (3.0 * nn - 1.0);
    const double k2 = 2.0 * nn / (3.0 * nn - 3.0);
    if (s <= k1) return nn - 0.5 * (3.0 * nn - 1.0) * s;
    if (s <= k2) return 0.5 * (3.0 * nn - 1.0) * s - nn;
    return s;
}

rem_gap_min rem_min_gap(int n) {
    if (n < 2) fail(errc::bad_argument, "min-gap estimate needs n >= 2");
    return {(2.0 * n / 3.0) * std::exp2(-0.5 * n), 2.0 / 3.0};
}

rem_gap_min min_gap_numeric(const validated_spectrum& vs, double lo, double hi, double s_tol) {
    auto gap_at = [&](double s) {
        const auto r = secular_lowest(vs, s, 2);
        return r[1] - r[0];
    };
    // coarse bracket of the minimum, then golden-section refinement
    const int coarse = 257;
    double best_s = lo, best_g = std::numeric_limits<double>::infinity();
    for (int i = 0; i < coarse; ++i) {
        const double s = lo + (hi - lo) * i / (coarse - 1.0);
        const double g = gap_at(s);
        if (g < best_g) { best_g = g; best_s = s; }
    }
    const double step = (hi - lo) / (coarse - 1.0);
    double a = std::max(lo, best_s - step), b = std::min(hi, best_s + step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = gap_at(x1), f2 = gap_at(x2);
    while (b - a > s_tol) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = gap_at(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = gap_at(x2);
        }
    }
    const double s_star = 0.5 * (a + b);
    return {gap_at(s_star), s_star};
}

} // namespace sopsim
