#pragma once

#include <vector>

#include "sopsim/spectrum.hpp"

namespace sopsim {

// H_eff(s) = s*diag(f) - (1-s)*E_0*vv^T acting on class amplitudes b_j =
// sqrt(eta_j) c_j, with v_j = sqrt(eta_j).  The offset e_0 is excluded: it
// contributes a global phase only.
struct effective_hamiltonian {
    double s = 0.0;
    std::vector<double> diag;      // s * f_j
    std::vector<double> v;         // sqrt(eta_j), unit norm
    double rank1_weight = 0.0;     // (1-s) * E_0
};

effective_hamiltonian build_effective(const validated_spectrum& vs, double s);

struct spectral_data {
    double s = 0.0;
    std::vector<double> eigenvalues;   // ascending
    std::vector<double> ground;        // unit eigenvector for eigenvalues[0]
    std::vector<double> excited;       // eigenvector for eigenvalues[1]; empty if K = 0
    double gap = 0.0;                  // eigenvalues[1] - eigenvalues[0]
    double v01 = 0.0;                  // |<0| dH/ds |1>|
    bool degenerate_ground = false;
};

// K+1 <= dense_eigensolver_cap uses a full symmetric eigensolve; this is the
// cross-check route and must stay independent of the secular solver.
inline constexpr std::size_t dense_eigensolver_cap = 64;

spectral_data eigensystem(const validated_spectrum& vs, double s);

// All K+1 roots of  sum_k (1-s)E0 eta_k / (s f_k - lambda) = 1, ascending.
// One root lies below s f_0 and one in each interval between consecutive
// poles.  Bisection to a machine-relative bracket width, then Newton polish.
std::vector<double> secular_roots(const validated_spectrum& vs, double s);
std::vector<double> secular_lowest(const validated_spectrum& vs, double s, std::size_t count);

// Eigenvector of the secular root lambda via b_j ~ v_j / (s f_j - lambda).
std::vector<double> secular_vector(const validated_spectrum& vs, double s, double lambda);

// Dense route for small systems, secular otherwise.
spectral_data spectral_at(const validated_spectrum& vs, double s);

// |<u| (diag(f) + E0 vv^T) |w>| for the two lowest eigenvectors.
double matrix_element(const validated_spectrum& vs, const std::vector<double>& u,
                      const std::vector<double>& w);

// Piecewise-linear large-n approximation of the lowest gap of the n-bit
// random-energy spectrum: n-(3n-1)s/2, then (3n-1)s/2-n, then s.
double rem_gap_asymptotic(int n, double s);

struct rem_gap_min {
    double gap = 0.0;
    double s_star = 0.0;
};

// Closed-form estimate (2n/3) 2^(-n/2) attained near s = 2/3.
rem_gap_min rem_min_gap(int n);

// Golden-section minimum of the secular gap over s in (lo, hi).
rem_gap_min min_gap_numeric(const validated_spectrum& vs, double lo = 0.02, double hi = 0.98,
                            double s_tol = 1e-12);

} // namespace sopsim
