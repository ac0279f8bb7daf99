#include "chs/mat2.hpp"

#include <algorithm>

namespace chs {

namespace {

// cosh(rho) and sinh(rho)/rho for complex rho with a series branch near 0.
void cosh_sinhc(cdouble rho, cdouble& ch, cdouble& shc) {
    if (std::abs(rho) < 1e-4) {
        const cdouble r2 = rho * rho;
        // six terms each; next term ~ 1e-48 at the switch point
        ch = 1.0 + r2 * (1.0 / 2 + r2 * (1.0 / 24 + r2 * (1.0 / 720 + r2 * (1.0 / 40320 + r2 / 3628800.0))));
        shc = 1.0 + r2 * (1.0 / 6 + r2 * (1.0 / 120 + r2 * (1.0 / 5040 + r2 * (1.0 / 362880 + r2 / 39916800.0))));
    } else {
        ch = std::cosh(rho);
        shc = std::sinh(rho) / rho;
    }
}

}  // namespace

Mat2C expm_tracefree(const Mat2C& a) {
    const double scale = max_abs_entry(a);
    if (std::abs(a.trace()) > 1e-12 * (1.0 + scale))
        throw NonTraceFree("expm_tracefree: matrix has nonzero trace");
    const cdouble rho = std::sqrt(-a.det());
    cdouble ch, shc;
    cosh_sinhc(rho, ch, shc);
    return {ch + shc * a.a11, shc * a.a12, shc * a.a21, ch + shc * a.a22};
}

ScaledMat2C expm_tracefree_scaled(const Mat2C& a) {
    const cdouble rho = std::sqrt(-a.det());
    const double sigma = std::abs(rho.real());
    if (sigma < 300.0) return {expm_tracefree(a), 0.0};
    if (std::abs(a.trace()) > 1e-12 * (1.0 + max_abs_entry(a)))
        throw NonTraceFree("expm_tracefree_scaled: matrix has nonzero trace");
    // cosh and sinhc prescaled by e^{-sigma}; both exponents now have
    // nonpositive real part
    const cdouble ep = std::exp(rho - sigma), em = std::exp(-rho - sigma);
    const cdouble ch = 0.5 * (ep + em);
    const cdouble shc = 0.5 * (ep - em) / rho;
    return {{ch + shc * a.a11, shc * a.a12, shc * a.a21, ch + shc * a.a22}, sigma};
}

Mat2R expm_tracefree(const Mat2R& a) {
    const double scale = max_abs_entry(a);
    if (std::abs(a.trace()) > 1e-12 * (1.0 + scale))
        throw NonTraceFree("expm_tracefree: matrix has nonzero trace");
    const cdouble rho = std::sqrt(cdouble(-a.det(), 0.0));
    cdouble ch, shc;
    cosh_sinhc(rho, ch, shc);
    const double c = ch.real(), s = shc.real();
    return {c + s * a.a11, s * a.a12, s * a.a21, c + s * a.a22};
}

Mat2R cholesky_upper(const Mat2R& a) {
    if (!is_symmetric(a)) throw NotPositiveDefinite("cholesky_upper: matrix not symmetric");
    const double tol = 1e-14 * (1.0 + std::abs(a.trace()));
    if (a.a11 <= tol || a.det() <= tol * (1.0 + std::abs(a.a11)))
        throw NotPositiveDefinite("cholesky_upper: matrix not positive definite");
    const double l1 = std::sqrt(a.a11);
    return {l1, a.a12 / l1, 0.0, std::sqrt(a.det() / a.a11)};
}

cdouble mobius(const Mat2C& a, cdouble z, double tol) {
    const cdouble den = a.a21 * z + a.a22;
    if (std::abs(den) <= tol) throw PoleHit("mobius: c z + d vanishes");
    return (a.a11 * z + a.a12) / den;
}

Mat2R random_sl2(Rng& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double a = u(rng);
    while (std::abs(a) < 1e-2) a = u(rng);
    const double b = u(rng);
    const double c = u(rng);
    return {a, b, c, (1.0 + b * c) / a};
}

Mat2R random_psd(Rng& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const Mat2R b{u(rng), u(rng), u(rng), u(rng)};
    return b.transpose() * b;
}

Mat2R random_spd_det1(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> ud(lo, hi);
    std::uniform_real_distribution<double> uo(-0.5, 0.5);
    for (;;) {
        const double h11 = ud(rng);
        const double h12 = uo(rng);
        const double h22 = (1.0 + h12 * h12) / h11;
        if (h22 >= lo && h22 <= hi * 2.0) return {h11, h12, h12, h22};
    }
}

DetLemmaReport check_det_lemmas(std::size_t n, std::uint64_t seed, double slack) {
    Rng rng(seed);
    DetLemmaReport rep;
    rep.samples = n;
    auto note = [&](double margin, std::size_t& counter) {
        rep.worst_slack = std::min(rep.worst_slack, margin);
        if (margin < -slack) ++counter;
    };
    for (std::size_t k = 0; k < n; ++k) {
        const Mat2R a = random_psd(rng);
        const Mat2R b = random_psd(rng);
        const double da = std::max(a.det(), 0.0), db = std::max(b.det(), 0.0);
        const double scale = 1.0 + da + db + a.trace() * b.trace();

        const double mink = (a + b).det() - (std::sqrt(da) + std::sqrt(db)) * (std::sqrt(da) + std::sqrt(db));
        note(mink / scale, rep.minkowski_violations);

        note(((a + b).det() - da - db) / scale, rep.superadd_violations);

        note((((a + b) * 0.5).det() - std::sqrt(da * db)) / scale, rep.mean_violations);

        // A <= D with D = A + PSD increment
        const Mat2R d = a + b;
        note((d.det() - a.det()) / scale, rep.monotone_violations);

        // ||Omega J Omega|| = det Omega for PSD Omega with positive determinant
        const Mat2R omega = a + Mat2R::identity() * 1e-3;
        const Mat2R oj = omega * J2 * omega;
        const double id = std::abs(op_norm(oj) - omega.det());
        note(-id / (1.0 + omega.det()), rep.omega_violations);

        // A^T J A = J on SL(2,R) samples
        const Mat2R s = random_sl2(rng);
        const Mat2R r = s.transpose() * J2 * s - J2;
        note(-max_abs_entry(r) / (1.0 + op_norm(s) * op_norm(s)), rep.symplectic_violations);
    }
    return rep;
}

}  // namespace chs
