#include "chs/solver.hpp"

#include <cmath>

namespace chs {

namespace {

// Propagator across one cell restricted to [s0, s1] (offsets from the cell
// start), in the scaled form e^{log_scale} m. For a constant cell this is
// exp(-z J h (s1-s0)); J^{-1} = -J turns J M' = z h M into M' = -z J h M
// with a trace-free generator. For a Dirac cell H = N^T N the substitution
// Y = N M gives the constant-coefficient system Y' = (J w - z det(N) J) Y, so
//   M(s1) = N(s1)^{-1} exp((J w - z d J) (s1-s0)) N(s0).
ScaledMat2C cell_factor(const Cell& c, double s0, double s1, cdouble z) {
    const double dt = s1 - s0;
    if (c.kind == Cell::Kind::Constant) {
        const Mat2C gen = Mat2C(J2 * c.h) * (-z * dt);
        return expm_tracefree_scaled(gen);
    }
    const double d = c.frame.det();
    const Mat2R jw = J2 * c.w;
    Mat2C gen(jw);
    gen = gen + Mat2C(J2) * (-z * d);
    gen = gen * cdouble(dt, 0.0);
    ScaledMat2C f = expm_tracefree_scaled(gen);
    const Mat2R n1 = c.dirac_frame_at(s1);
    const Mat2R n0 = c.dirac_frame_at(s0);
    const double nd = n1.det();
    const Mat2C n1inv(Mat2R{n1.a22 / nd, -n1.a12 / nd, -n1.a21 / nd, n1.a11 / nd});
    f.m = n1inv * f.m * Mat2C(n0);
    return f;
}

// Running product with renormalization; the true matrix is e^{log_scale} m.
ScaledMat2C assemble_scaled(const PiecewiseHamiltonian& h, double t0, double t1, cdouble z) {
    ScaledMat2C acc{Mat2C::identity(), 0.0};
    auto push = [&](const ScaledMat2C& f) {
        acc.m = f.m * acc.m;
        acc.log_scale += f.log_scale;
        const double s = max_abs_entry(acc.m);
        if (s > 1e100 || (s > 0 && s < 1e-100)) {
            acc.m = acc.m * cdouble(1.0 / s, 0.0);
            acc.log_scale += std::log(s);
        }
    };
    double a = 0;
    for (const auto& c : h.cells) {
        const double b = a + c.len;
        const double lo = std::max(t0, a), hi = std::min(t1, b);
        if (hi > lo) push(cell_factor(c, lo - a, hi - a, z));
        a = b;
    }
    if (t1 > a) {
        const double lo = std::max(t0, a);
        const Mat2C gen = Mat2C(J2 * h.tail) * (-z * (t1 - lo));
        push(expm_tracefree_scaled(gen));
    }
    return acc;
}

Mat2C assemble(const PiecewiseHamiltonian& h, double t0, double t1, cdouble z) {
    const ScaledMat2C s = assemble_scaled(h, t0, t1, z);
    return s.m * std::exp(cdouble(s.log_scale, 0.0));
}

}  // namespace

TransferMatrix transfer(const PiecewiseHamiltonian& h, double t, cdouble z) {
    return {assemble(h, 0.0, t, z), t, z};
}

Mat2C transfer_between(const PiecewiseHamiltonian& h, double t0, double t1, cdouble z) {
    return assemble(h, t0, t1, z);
}

cdouble weyl_constant(const Mat2R& a) {
    if (!is_positive_definite(a))
        throw NotPositiveDefinite("weyl_constant: matrix not positive definite");
    return cdouble(a.a12, std::sqrt(a.det())) / a.a11;
}

HerglotzPoint weyl_fc(const PiecewiseHamiltonian& h, cdouble z) {
    if (!(z.imag() > 0)) throw Error("weyl_fc: z must lie in the upper half-plane");
    require_valid(h);
    const cdouble ml = weyl_constant(h.tail);
    const Mat2C m = assemble_scaled(h, 0.0, h.ell(), z).m;  // common scale cancels
    const cdouble den = m.a11 + ml * m.a21;
    if (std::abs(den) <= 1e-300) throw PoleHit("weyl_fc: denominator vanished");
    return {z, (m.a12 + ml * m.a22) / den};
}

cdouble weyl_at_r(const PiecewiseHamiltonian& h, double r, cdouble z) {
    if (r <= 0) return weyl_fc(h, z).m;
    if (r >= h.ell()) return weyl_constant(h.tail);
    // Stable route: assemble the shifted Hamiltonian directly. Inverting the
    // composition formula (10) at r loses all precision once xi(r) is large.
    return weyl_fc(shift(h, r), z).m;
}

double log_spectral_density_at(const PiecewiseHamiltonian& h, double x) {
    const cdouble ml = weyl_constant(h.tail);
    const ScaledMat2C sm = assemble_scaled(h, 0.0, h.ell(), cdouble(x, 0.0));
    const cdouble tp = sm.m.a11, tm = sm.m.a21;
    double log_f;
    if (std::abs(tm) >= std::abs(tp))
        log_f = std::log(std::abs(tm)) + std::log(std::abs(tp / tm + ml));
    else
        log_f = std::log(std::abs(tp)) + std::log(std::abs(1.0 + ml * (tm / tp)));
    return std::log(ml.imag()) - 2.0 * (log_f + sm.log_scale);
}

double spectral_density_at(const PiecewiseHamiltonian& h, double x) {
    return std::exp(log_spectral_density_at(h, x));
}

std::vector<double> spectral_density(const PiecewiseHamiltonian& h, const std::vector<double>& xs) {
    require_valid(h);
    if (!is_positive_definite(h.tail))
        throw NotPositiveDefinite("spectral_density: tail not positive definite");
    std::vector<double> w;
    w.reserve(xs.size());
    for (double x : xs) w.push_back(spectral_density_at(h, x));
    return w;
}

std::vector<WeylProbeSample> weyl_limit_probe(const PiecewiseHamiltonian& h, cdouble z,
                                              double omega, bool omega_inf,
                                              const std::vector<double>& t_list) {
    if (!(z.imag() > 0)) throw Error("weyl_limit_probe: z must lie in the upper half-plane");
    std::vector<WeylProbeSample> out;
    out.reserve(t_list.size());
    for (double t : t_list) {
        const Mat2C m = assemble(h, 0.0, t, z);
        cdouble num, den;
        if (omega_inf) {
            num = m.a12;  // Phi+ / Theta+: the infinity convention c1/c3
            den = m.a11;
        } else {
            num = omega * m.a12 + m.a22;
            den = omega * m.a11 + m.a21;
        }
        if (std::abs(den) <= 1e-300 * (1.0 + std::abs(num)))
            out.push_back({t, std::nullopt});
        else
            out.push_back({t, num / den});
    }
    return out;
}

double entropy_closed_form(const PiecewiseHamiltonian& h) {
    require_valid(h);
    if (!is_positive_definite(h.tail))
        throw NotPositiveDefinite("entropy_closed_form: tail not positive definite");
    const double ell = h.ell();
    const cdouble ml = weyl_constant(h.tail);
    const ScaledMat2C sm = assemble_scaled(h, 0.0, ell, cdouble(0.0, 1.0));
    const cdouble f = sm.m.a11 + ml * sm.m.a21;
    const cdouble m0 = (sm.m.a12 + ml * sm.m.a22) / f;
    const double xi_ell = xi_eta(h).xi(ell);
    return std::log(m0.imag()) - std::log(ml.imag()) - 2.0 * xi_ell +
           2.0 * (std::log(std::abs(f)) + sm.log_scale);
}

double entropy_at_r(const PiecewiseHamiltonian& h, double r) {
    if (r <= 0) return entropy_closed_form(h);
    if (r >= h.ell()) return 0.0;  // constant positive definite tail
    return entropy_closed_form(shift(h, r));
}

// Defined here rather than with the model: needs Weyl data at r.
PiecewiseHamiltonian bernstein_szego(const PiecewiseHamiltonian& h, double r) {
    require_valid(h);
    const cdouble mr = weyl_at_r(h, r, cdouble(0.0, 1.0));
    const double I = mr.imag(), R = mr.real();
    if (!(I > 0)) throw Error("bernstein_szego: Im m_r(i) not positive");
    PiecewiseHamiltonian out;
    const PiecewiseHamiltonian s = split_at(h, r);
    double a = 0;
    for (const auto& c : s.cells) {
        if (a + c.len <= r + 0.0) out.cells.push_back(c);
        a += c.len;
        if (a >= r) break;
    }
    out.tail = Mat2R{1.0 / I, R / I, R / I, (I * I + R * R) / I};
    return out;
}

}  // namespace chs
