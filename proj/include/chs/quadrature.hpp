#pragma once

#include <functional>
#include <vector>

#include "chs/mat2.hpp"

namespace chs {
namespace quad {

// Pairwise (tree) sum in ascending index order; deterministic and accurate.
double pairwise_sum(std::vector<double> terms);

// n-point composite Gauss-Legendre of f over [a, b] with `panels` panels.
double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                      int panels = 1);

// Recursive bisection with a two-half error estimate on a finite interval;
// resolves sharp integrable features down to scale (b-a) * 2^{-depth}.
double adaptive_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10, int depth = 30);

// (1/pi) * integral of F(x) / (1+x^2) dx over R, via x = tan(theta):
// (1/pi) * integral_{-pi/2}^{pi/2} F(tan theta) dtheta.
// Composite 16-point Gauss-Legendre on 2^k uniform panels whose outermost
// panels are peeled geometrically toward +-pi/2 (open nodes, no endpoint
// evaluation); k is doubled until two successive estimates differ by less
// than tol, else QuadratureNotConverged. log-type endpoint singularities
// are integrable and resolved by the peel.
double poisson_i(const std::function<double(double)>& F, double tol = 1e-7,
                 int k_max = 14, int* out_level = nullptr,
                 double* out_error_estimate = nullptr);

// (1/pi) * integral of F(x) * Im z / |x - z|^2 dx over R (Poisson average
// at z in the upper half-plane); same engine.
double poisson_at(const std::function<double(double)>& F, cdouble z, double tol = 1e-7,
                  int k_max = 14);

}  // namespace quad
}  // namespace chs
