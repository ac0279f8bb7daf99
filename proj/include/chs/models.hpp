#pragma once

#include <utility>
#include <vector>

#include "chs/factorization.hpp"
#include "chs/hamiltonian.hpp"

namespace chs {

// Piecewise-constant real symmetric trace-free potential of the half-line
// Dirac operator J f' + V f.
struct DiracPotential {
    std::vector<std::pair<double, Mat2R>> cells;  // (length, V)
    double extent() const {
        double t = 0;
        for (const auto& c : cells) t += c.first;
        return t;
    }
};

// Canonical Hamiltonian H = N0^T N0 with J N0' + V N0 = 0, N0(0) = I, as
// exact Dirac cells; the tail is the constant N0^T(T) N0(T). det H == 1.
PiecewiseHamiltonian dirac_to_hamiltonian(const DiracPotential& v);

// Exact factorization shipped with Dirac-generated Hamiltonians:
// G = N0, Q = I, V the potential (split: V1 = 0, V2 = V).
FactorizationTriple dirac_factorization(const DiracPotential& v, double grid_step = 1.0 / 64);

// H = diag(1,0) on [0,L] with tail I; m(z) = i/(1 - izL), K~ = 2L,
// K = log(1 + L).
struct Example1 {
    PiecewiseHamiltonian h;
    double L = 1;
    double ktilde = 0;  // 2L
    double K = 0;       // log(1+L)
    cdouble m_of(cdouble z) const;
};
Example1 example1(double L);

// Dirac system with V = eps * offdiag on [0,T]: H = diag(e^{-2 eps t}, e^{2 eps t})
// then constant. Oracle: the closed K~ sum and the eigenvector formula for
// P*_{2r}(x), |x| < eps.
struct Example2 {
    PiecewiseHamiltonian h;
    double eps = 0;
    int T = 0;
    double ktilde_closed = 0;
    bool regime_warning = false;  // outside the eps^2 T -> infinity regime
    FactorizationTriple factorization;
    cdouble pstar_closed(double r, double x) const;
};
Example2 example2(double eps, int T);

// V = diag(v, -v): N0 = (cosh phi, sinh phi; sinh phi, cosh phi) with
// phi = int v; ships its exact factorization (q = 0, v1 = 0, v2 = ||v||_2).
struct Example3 {
    PiecewiseHamiltonian h;
    FactorizationTriple factorization;
    double v2_norm = 0;
};
Example3 example3(const std::vector<std::pair<double, double>>& v_cells);

}  // namespace chs
