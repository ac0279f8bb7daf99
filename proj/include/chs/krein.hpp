#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "chs/factorization.hpp"
#include "chs/solver.hpp"

namespace chs {

// Coefficients of the generalized Krein system
//   d/dr P*_{2r} = e^{2iu(r)} f(r,z) P_{2r} - i z g(r) P*_{2r},
//   d/dr P_{2r}  = i z (2 + g(r)) P_{2r} + e^{-2iu(r)} conj(f(r, conj z)) P*_{2r},
// with f(r,z) = alpha(r) + z beta(r):
//   alpha = -v + i (v11 - v22)/2,  beta = q - i (q11 - q22)/2,
//   g = trace Q / 2 - 1 >= 0,  u(r) = -1/2 int_0^r trace V.
// The phase e^{2iu} drops out whenever trace V = 0 (Dirac-type potentials).
struct KreinCoefficients {
    struct Piece {
        double t0 = 0, t1 = 0;
        bool constant = false;  // constant coefficients AND trace V = 0
        cdouble alpha_c{0, 0}, beta_c{0, 0};
        double g_c = 0, tv_c = 0;
        std::function<void(double, cdouble&, cdouble&, double&, double&)> eval;
        void at(double r, cdouble& alpha, cdouble& beta, double& g, double& tv) const {
            if (eval == nullptr) {
                alpha = alpha_c;
                beta = beta_c;
                g = g_c;
                tv = tv_c;
            } else {
                eval(r, alpha, beta, g, tv);
            }
        }
    };
    std::vector<Piece> pieces;  // covering [0, extent); zero beyond
    double extent = 0;
    Mat2R g0 = Mat2R::identity();  // G(0): P*_0 = g11 + i g21, P_0 = g11 - i g21

    // u(r) = -1/2 int_0^r trace V.
    double phase_u(double r) const;
};

KreinCoefficients krein_coefficients(const FactorizationTriple& f);

// Dual system: f -> -f, g unchanged, G(0) -> J^T G(0) J.
KreinCoefficients dual_coefficients(const KreinCoefficients& c);

struct KreinState {
    double r = 0;
    cdouble pstar{0, 0}, p{0, 0};
    double u = 0;
};

struct KreinPath {
    std::vector<KreinState> states;  // at record points (piece boundaries by default)
    bool gronwall_ok = true;
    double gronwall_margin = 0;  // min of bound - ||X|| over the checks
};

// Integrates the system. Constant pieces use one closed-form matrix
// exponential; elsewhere classical RK4 with steps of at most rk_step.
// Records the state at the sorted points of record_at (piece boundaries and
// r_max always included). Throws StepUnderflow if rk_step < 1e-9.
KreinPath propagate_krein(const KreinCoefficients& c, cdouble z, double r_max,
                          std::pair<cdouble, cdouble> init, double rk_step = 1.0 / 4096,
                          std::vector<double> record_at = {});

// Initial data read off G(0).
std::pair<cdouble, cdouble> krein_init(const KreinCoefficients& c);

// Theta~ = G(r) Theta(r, z), the Dirac-type column of (sd_h45).
std::pair<cdouble, cdouble> theta_tilde(const PiecewiseHamiltonian& h,
                                        const FactorizationTriple& f, double r, cdouble z);

// P*_{2r}(z) via the transfer path: e^{i r z + i u(r)} (Theta~+ + i Theta~-).
cdouble pstar_via_theta(const PiecewiseHamiltonian& h, const FactorizationTriple& f,
                        const KreinCoefficients& c, double r, cdouble z);

// Spectral density of the truncation H_(ell) as w(x) = |P*_{2 ell}(x)|^{-2}.
std::vector<double> density_via_pstar(const PiecewiseHamiltonian& h, const FactorizationTriple& f,
                                      double ell, const std::vector<double>& xs,
                                      double rk_step = 1.0 / 4096);

// Poisson identity residual |(1/pi) int log|P*(x)|^2 /(1+x^2) dx - 2 log|P*(i)||.
double outer_check(const std::function<double(double)>& pstar_sq_on_real_axis,
                   cdouble value_at_i, double tol = 1e-7);

// Same check with both sides derived from the factorized FC pair.
double outer_check_fc(const PiecewiseHamiltonian& h, const FactorizationTriple& f, double ell);

struct L44Audit {
    double sup_pstar_i = 0;    // sup_r |P*_{2r}(i)|
    double sup_product = 0;    // sup_r |P*_{2r}(i) P*_{2r,d}(i)|
    double a_diag = 1;         // G(0) = diag(a, 1/a)
    FactorizationNorms norms;
    bool gronwall_ok = true;
};

// Lemma 7.4 quantities on a normalized factorization and its dual.
L44Audit l44_bounds_audit(const PiecewiseHamiltonian& h, const FactorizationTriple& f);

}  // namespace chs
