#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "chs/errors.hpp"

namespace chs {

using cdouble = std::complex<double>;

// Real 2x2 matrix, row-major.
struct Mat2R {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

    static constexpr Mat2R identity() { return {1, 0, 0, 1}; }
    static constexpr Mat2R zero() { return {0, 0, 0, 0}; }

    constexpr double trace() const { return a11 + a22; }
    constexpr double det() const { return a11 * a22 - a12 * a21; }
    constexpr Mat2R transpose() const { return {a11, a21, a12, a22}; }

    constexpr Mat2R operator+(const Mat2R& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    constexpr Mat2R operator-(const Mat2R& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    constexpr Mat2R operator*(const Mat2R& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    constexpr Mat2R operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    friend constexpr Mat2R operator*(double s, const Mat2R& m) { return m * s; }

    // Inverse via adjugate; throws if the determinant is below tol.
    Mat2R inverse(double tol = 1e-300) const {
        const double d = det();
        if (std::abs(d) <= tol) throw Error("Mat2R::inverse: singular matrix");
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
};

// Complex 2x2 matrix, row-major. Products and determinants use exact complex arithmetic.
struct Mat2C {
    cdouble a11{0, 0}, a12{0, 0}, a21{0, 0}, a22{0, 0};

    static Mat2C identity() { return {1.0, 0.0, 0.0, 1.0}; }
    Mat2C(cdouble m11, cdouble m12, cdouble m21, cdouble m22) : a11(m11), a12(m12), a21(m21), a22(m22) {}
    Mat2C() = default;
    Mat2C(const Mat2R& m) : a11(m.a11), a12(m.a12), a21(m.a21), a22(m.a22) {}

    cdouble trace() const { return a11 + a22; }
    cdouble det() const { return a11 * a22 - a12 * a21; }

    Mat2C operator+(const Mat2C& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2C operator-(const Mat2C& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Mat2C operator*(const Mat2C& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2C operator*(cdouble s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    friend Mat2C operator*(cdouble s, const Mat2C& m) { return m * s; }

    // Inverse assuming det = 1 (symplectic propagators); adjugate, no division.
    Mat2C inverse_det1() const { return {a22, -a12, -a21, a11}; }
};

// J = (0 -1; 1 0), the symplectic unit of the canonical system.
inline constexpr Mat2R J2{0, -1, 1, 0};

inline double frobenius(const Mat2R& m) {
    return std::sqrt(m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22);
}

inline double max_abs_entry(const Mat2R& m) {
    return std::max(std::max(std::abs(m.a11), std::abs(m.a12)),
                    std::max(std::abs(m.a21), std::abs(m.a22)));
}

inline double max_abs_entry(const Mat2C& m) {
    return std::max(std::max(std::abs(m.a11), std::abs(m.a12)),
                    std::max(std::abs(m.a21), std::abs(m.a22)));
}

// Operator (spectral) norm from the closed-form 2x2 SVD: largest singular
// value. Entries are prescaled so squares cannot overflow.
inline double op_norm(const Mat2R& m) {
    const double s = max_abs_entry(m);
    if (s == 0.0) return 0.0;
    const double k = 1.0 / s;
    const Mat2R n{m.a11 * k, m.a12 * k, m.a21 * k, m.a22 * k};
    const double t = n.a11 * n.a11 + n.a12 * n.a12 + n.a21 * n.a21 + n.a22 * n.a22;
    const double d = n.det();
    const double disc = std::sqrt(std::max(t * t - 4.0 * d * d, 0.0));
    return s * std::sqrt(0.5 * (t + disc));
}

inline double op_norm(const Mat2C& m) {
    const double s = max_abs_entry(m);
    if (s == 0.0) return 0.0;
    const cdouble k(1.0 / s, 0.0);
    const Mat2C n = m * k;
    const double t = std::norm(n.a11) + std::norm(n.a12) + std::norm(n.a21) + std::norm(n.a22);
    const double d = std::norm(n.det());
    const double disc = std::sqrt(std::max(t * t - 4.0 * d, 0.0));
    return s * std::sqrt(0.5 * (t + disc));
}

inline bool is_symmetric(const Mat2R& m, double tol = 1e-12) {
    return std::abs(m.a12 - m.a21) <= tol * (1.0 + std::abs(m.a12) + std::abs(m.a21));
}

// Eigenvalues of a symmetric 2x2 matrix, ascending; scaled against overflow.
inline void sym_eigenvalues(const Mat2R& m, double& lo, double& hi) {
    const double s = std::max(max_abs_entry(m), 1.0);
    const double a = m.a11 / s, b = m.a22 / s;
    const double off = 0.5 * (m.a12 + m.a21) / s;
    const double mean = 0.5 * (a + b);
    const double disc = std::sqrt(0.25 * (a - b) * (a - b) + off * off);
    lo = s * (mean - disc);
    hi = s * (mean + disc);
}

// PSD test with the relative tolerance eigenvalues >= -1e-12*(1+trace);
// absorbs rounding accumulated by integral assembly.
inline bool is_psd(const Mat2R& m, double tol_scale = 1e-12) {
    if (!is_symmetric(m)) return false;
    double lo, hi;
    sym_eigenvalues(m, lo, hi);
    return lo >= -tol_scale * (1.0 + std::abs(m.trace()));
}

inline bool is_positive_definite(const Mat2R& m, double tol = 1e-14) {
    // scale-relative: diag(e^{-100}, e^{100}) is positive definite
    const double scale = std::abs(m.a11 * m.a22) + m.a12 * m.a12;
    return is_symmetric(m) && m.a11 > 0.0 && m.det() > tol * scale;
}

inline bool is_sl2(const Mat2R& m, double tol = 1e-9) { return std::abs(m.det() - 1.0) <= tol; }

// Square root of a PSD symmetric 2x2 matrix, closed form.
inline Mat2R sqrt_psd(const Mat2R& s) {
    const double d = std::sqrt(std::max(s.det(), 0.0));
    const double t = s.trace() + 2.0 * d;
    if (t <= 0.0) return Mat2R::zero();
    const double k = 1.0 / std::sqrt(t);
    return {(s.a11 + d) * k, s.a12 * k, s.a21 * k, (s.a22 + d) * k};
}

// exp(A) for trace-free A: Cayley-Hamilton gives A^2 = -det(A) I, so
// exp(A) = cosh(rho) I + sinhc(rho) A with rho^2 = -det A. A series branch
// below |rho| = 1e-4 avoids cancellation; relative error < 1e-24 at the switch.
Mat2C expm_tracefree(const Mat2C& a);

// Scaled form exp(A) = e^{log_scale} * m for long propagations: entries of
// the true exponential reach e^{|Re rho|} and overflow near 710.
struct ScaledMat2C {
    Mat2C m;
    double log_scale = 0.0;
};
ScaledMat2C expm_tracefree_scaled(const Mat2C& a);

// Real specialization (same closed form, real arithmetic).
Mat2R expm_tracefree(const Mat2R& a);

// Upper-triangular factor L with L^T L = A, positive diagonal:
// L = (sqrt(a1), a/sqrt(a1); 0, sqrt((a1 a2 - a^2)/a1)).
Mat2R cholesky_upper(const Mat2R& a);

// Mobius action (a z + b)/(c z + d) of a complex 2x2 matrix on a point.
cdouble mobius(const Mat2C& a, cdouble z, double tol = 1e-300);

// --- randomized sample generators (deterministic given the seed) ---

using Rng = std::mt19937_64;

// A = (a, b; c, (1+bc)/a), a,b,c uniform in [-2,2], |a| >= 1e-2.
Mat2R random_sl2(Rng& rng);

// Random PSD matrix B^T B with bounded entries.
Mat2R random_psd(Rng& rng);

// Random symmetric positive definite matrix with det = 1 and diagonal
// entries in [lo, hi] (used for FC test instances).
Mat2R random_spd_det1(Rng& rng, double lo = 0.5, double hi = 2.0);

// --- determinant-inequality report (appendix lemmas as checkable predicates) ---

struct DetLemmaReport {
    std::size_t samples = 0;
    std::size_t minkowski_violations = 0;   // det(A+B) >= (sqrt det A + sqrt det B)^2
    std::size_t superadd_violations = 0;    // det(A+B) >= det A + det B
    std::size_t mean_violations = 0;        // det((A+B)/2) >= sqrt(det A det B)
    std::size_t monotone_violations = 0;    // A <= D  =>  det A <= det D
    std::size_t symplectic_violations = 0;  // A^T J A = J for random SL2 samples
    std::size_t omega_violations = 0;       // ||Omega J Omega|| = det Omega, Omega PSD
    double worst_slack = 0.0;               // most negative inequality margin seen
    bool pass(double slack = 1e-10) const {
        return minkowski_violations + superadd_violations + mean_violations +
                   monotone_violations + symplectic_violations + omega_violations == 0 ||
               worst_slack >= -slack;
    }
};

// Evaluates the appendix determinant lemmas on `n` random PSD pairs (and SL2
// samples); inequalities count as violated when the margin drops below -slack.
DetLemmaReport check_det_lemmas(std::size_t n, std::uint64_t seed = 2654435761u,
                                double slack = 1e-10);

}  // namespace chs
