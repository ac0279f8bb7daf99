#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "chs/hamiltonian.hpp"

namespace chs {

struct FactorizationNorms {
    double q = 0.0;   // || trace Q - 2 ||_L1
    double v1 = 0.0;  // || V1 ||_L1
    double v2 = 0.0;  // || V2 ||_L2
};

// (q, v1, v2)-factorization H = G^T Q G with G' = J V G, V = V1 + V2.
// Q, V1, V2 are described piecewise (smooth between breakpoints, possibly
// constant) together with an exact evaluator for G; the `grid` arrays hold
// the sampled paths used for verification, export, and plots.
struct FactorizationTriple {
    struct Piece {
        double t0 = 0, t1 = 0;
        bool constant = false;
        Mat2R Qc, V1c, V2c;  // values when constant
        std::function<void(double, Mat2R&, Mat2R&, Mat2R&)> eval;  // absolute time
    };
    std::vector<Piece> pieces;  // covering [0, extent); Q = I, V = 0 beyond
    double extent = 0.0;
    std::function<Mat2R(double)> G_eval;  // exact G(t); constant for t >= extent

    std::vector<double> grid;
    std::vector<Mat2R> G, Q, V1, V2;
    FactorizationNorms norms;
    // Jump points of Q, V interior to pieces (typically H cell boundaries);
    // coefficients are smooth between consecutive breakpoints.
    std::vector<double> smooth_breaks;

    Mat2R G_at(double t) const { return G_eval(t); }
    void QV_at(double t, Mat2R& q, Mat2R& v1, Mat2R& v2) const;
};

// One step of the triangular recursion: C = (L_A^{-1})^T B L_A^{-1} and its
// Cholesky factor, with the Lemma 9.1 diagnostics.
struct TriangularStep {
    Mat2R lambda_c;  // upper-triangular factor of C
    double x = 0, y = 0, z = 0;
    double delta = 0;      // det((A+B)/2) - 1
    double delta_hat = 0;  // (x - z)/2
};
TriangularStep triangular_step(const Mat2R& a, const Mat2R& b);

// Oscillation-side construction (unit-determinant H with finite K~):
// window averages H_n, the Lambda recursion, linear interpolation g, and the
// normalized G, Q, V with the threshold split of V.
FactorizationTriple factorize_oscillation(const PiecewiseHamiltonian& h, double grid_step = 1.0 / 64);

// Spectral-side construction from the Weyl data (I_H, R_H) and finite
// differences for their derivatives.
FactorizationTriple factorize_spectral(const PiecewiseHamiltonian& h, double fd_step = 1e-5,
                                       double grid_step = 1.0 / 64);

struct FactorizationVerification {
    double residual_h = 0;     // sup |H - G^T Q G| over the grid (entrywise)
    double residual_det_g = 0;
    double residual_det_q = 0;
    double min_eig_q = 0;      // most negative eigenvalue of Q seen
    double residual_sym_v = 0;
    double residual_ode = 0;   // sup |G' - J V G| at interior smooth points
    FactorizationNorms norms;  // recomputed from the stored split
};
FactorizationVerification verify_factorization(const PiecewiseHamiltonian& h,
                                               const FactorizationTriple& f);

// Lemma 7.1 normalization: A = G^{-1}(0) B C_phi with m_A(i) = i and
// G_A(0) = diag(a, 1/a), a in (0, 1]; norms are unchanged.
struct NormalizedFactorization {
    Mat2R a_matrix;
    double a_diag = 1.0;  // the diagonal entry of G_A(0)
    PiecewiseHamiltonian h;
    FactorizationTriple f;
};
NormalizedFactorization normalize_l18(const PiecewiseHamiltonian& h, const FactorizationTriple& f);

// Truncation (sd_h77): Q -> Q on [0,l'] then I, V -> V on [0,l'] then 0;
// H_(l') equals H on [0,l'] and G^T(l') G(l') afterwards.
struct TruncatedPair {
    PiecewiseHamiltonian h;
    FactorizationTriple f;
};
TruncatedPair truncate_factorized(const PiecewiseHamiltonian& h, const FactorizationTriple& f,
                                  double ell_prime);

// Norms re-derived from a stored split by integration over the pieces.
FactorizationNorms compute_norms(const FactorizationTriple& f, const PiecewiseHamiltonian& h);

}  // namespace chs
