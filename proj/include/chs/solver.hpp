#pragma once

#include <optional>
#include <vector>

#include "chs/hamiltonian.hpp"

namespace chs {

// Solution M(t, z) of J M' = z H M, M(0, z) = I, assembled as an ordered
// product of closed-form cell propagators. Entry layout follows
// M = (Theta+, Phi+; Theta-, Phi-).
struct TransferMatrix {
    Mat2C m = Mat2C::identity();
    double t = 0.0;
    cdouble z{0.0, 0.0};
};

// Transfer over [0, t].
TransferMatrix transfer(const PiecewiseHamiltonian& h, double t, cdouble z);

// Transfer over [t0, t1] (the factor with M(t1) = N * M(t0)).
Mat2C transfer_between(const PiecewiseHamiltonian& h, double t0, double t1, cdouble z);

// Weyl value of a constant positive definite Hamiltonian:
// m = (a12 + i sqrt(det A)) / a11.
cdouble weyl_constant(const Mat2R& a);

struct HerglotzPoint {
    cdouble z;
    cdouble m;
    double I() const { return m.imag(); }
    double R() const { return m.real(); }
};

// Titchmarsh-Weyl function of an FC Hamiltonian with positive definite tail:
// m(z) = (Phi+(l,z) + m_l Phi-(l,z)) / (Theta+(l,z) + m_l Theta-(l,z)).
HerglotzPoint weyl_fc(const PiecewiseHamiltonian& h, cdouble z);

// Weyl function of the shifted Hamiltonian t -> H(t + r).
cdouble weyl_at_r(const PiecewiseHamiltonian& h, double r, cdouble z);

// Spectral density w(x) = Im m(x + i0) on a real grid; exact for FC input:
// w = Im(m_tail) / |Theta+(l,x) + m_tail Theta-(l,x)|^2.
std::vector<double> spectral_density(const PiecewiseHamiltonian& h, const std::vector<double>& xs);
double spectral_density_at(const PiecewiseHamiltonian& h, double x);

// log w(x), evaluated with ratio scaling: the product m_tail * Theta- can
// overflow long before w itself leaves the representable range (Dirac tails
// reach e^{2 eps T}).
double log_spectral_density_at(const PiecewiseHamiltonian& h, double x);

// Diagnostic probe of the Weyl limit (mf): (w Phi+ + Phi-)/(w Theta+ + Theta-)
// along t_list; omega = infinity is encoded by omega_inf = true.
struct WeylProbeSample {
    double t;
    std::optional<cdouble> value;  // empty when the denominator vanished
};
std::vector<WeylProbeSample> weyl_limit_probe(const PiecewiseHamiltonian& h, cdouble z,
                                              double omega, bool omega_inf,
                                              const std::vector<double>& t_list);

// Entropy K_H(0) in closed form:
//   log Im m(i) - log Im m_l(i) - 2 xi(l) + 2 log|Theta+(l,i) + m_l Theta-(l,i)|.
double entropy_closed_form(const PiecewiseHamiltonian& h);

// K_H(r) by the same identity applied to the shifted Hamiltonian; exactly 0
// for r >= ell.
double entropy_at_r(const PiecewiseHamiltonian& h, double r);

}  // namespace chs
