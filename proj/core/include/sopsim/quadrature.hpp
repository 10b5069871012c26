#pragma once

#include <functional>
#include <vector>

#include "sopsim/errors.hpp"

namespace sopsim {

struct quadrature_options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-12;   // floor on the local target: 15*max(abs, rel*|S|)
    int max_depth = 48;
};

// Adaptive Simpson with Richardson extrapolation on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const quadrature_options& opt = {});

// Sum of integrals over consecutive panels [edges[i], edges[i+1]].
// Edges need not be sorted as a whole, only consecutive within a panel.
double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& edges,
                        const quadrature_options& opt = {});

} // namespace sopsim
