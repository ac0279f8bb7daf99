#pragma once

#include <vector>

#include "chs/hamiltonian.hpp"
#include "chs/solver.hpp"

namespace chs {

// The oscillation functional K~(H) = sum_n (det int_{eta_n}^{eta_{n+2}} H - 4).
struct KtildeReport {
    struct Term {
        int n;
        double value;  // det of the window integral minus 4, >= 0
    };
    std::vector<Term> terms;
    double total = 0.0;
    int n_cutoff = 0;  // terms with n >= n_cutoff vanish (constant-tail region)
};

// Exact cellwise evaluation; summation stops at n_cutoff = ceil(xi(ell)) + 2.
// Throws EtaUnreachable when sqrt(det H) is integrable (K~ undefined).
KtildeReport ktilde(const PiecewiseHamiltonian& h);

// Matrix-A2 form for det = 1 Hamiltonians:
// K~ = 4 sum_n (||<H>^{1/2}_{[n,n+2]} <H^{-1}>^{1/2}_{[n,n+2]}||^2 - 1).
double ktilde_a2(const PiecewiseHamiltonian& h);

// Scalar A2 bound for the (1,1) entry of a det = 1 Hamiltonian:
// sum_n ((int h1)(int h1^{-1}) - 4) over [n, n+2] windows, paired with K~.
struct DiagA2Pair {
    double lhs;  // scalar A2 sum for h1
    double rhs;  // K~(H)
};
DiagA2Pair diag_a2_bound(const PiecewiseHamiltonian& h);

struct EntropyReport {
    double K = 0.0;
    double logI = 0.0;
    double J = 0.0;
    double quadrature_error_estimate = 0.0;
    enum class Method { ClosedForm, Quadrature } method = Method::Quadrature;
};

// K_m = log Im m(i) - (1/pi) int log w(x) / (1+x^2) dx by tan-substituted
// composite Gauss-Legendre quadrature of the spectral density.
EntropyReport entropy_quadrature(const PiecewiseHamiltonian& h, double tol = 1e-7);

// Same report filled from the closed-form identity.
EntropyReport entropy_closed_report(const PiecewiseHamiltonian& h);

// Entropy profile r -> K_H(r) at the given boundaries (shifted closed form).
std::vector<std::pair<double, double>> entropy_profile(const PiecewiseHamiltonian& h,
                                                       const std::vector<double>& boundaries);

// Both sides of Theorem 1.2 with diagnostic ratios; the absolute constants
// are unspecified in the statement, so only finiteness is flagged.
struct Theorem1Audit {
    double K_m = 0.0;
    double ktilde = 0.0;
    double ratio = 0.0;            // K~ / K_m (0 when K_m == 0)
    double exp_ratio = 0.0;        // K~ / (K_m e^{K_m})
    bool finiteness_violated = false;
};
Theorem1Audit theorem1_audit(const PiecewiseHamiltonian& h);

// Smallest C with ktilde <= C * K * e^{C K} (bisection); 0 when both vanish.
double fitted_growth_constant(double K, double ktilde_value);

}  // namespace chs
