#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chs/mat2.hpp"

namespace chs {

// One Hamiltonian cell on an interval of the given length.
//
// Two kinds are supported:
//   Constant: H(s) = h, any symmetric PSD matrix (rank-1 allowed).
//   Dirac:    H(s) = N(s)^T N(s) with N(s) = exp(J w s) * frame, where w is
//             symmetric trace-free and frame is real with det(frame) > 0.
//             These cells represent Hamiltonians generated by Dirac systems
//             exactly: det H == det(frame)^2 is constant on the cell and all
//             integrals and transfer factors have closed forms.
struct Cell {
    enum class Kind { Constant, Dirac };
    Kind kind = Kind::Constant;
    double len = 0.0;
    Mat2R h;      // Constant: the matrix
    Mat2R frame;  // Dirac: N at the cell start
    Mat2R w;      // Dirac: potential (symmetric, trace-free)

    static Cell constant(double len, const Mat2R& h) {
        Cell c;
        c.kind = Kind::Constant;
        c.len = len;
        c.h = h;
        return c;
    }
    static Cell dirac(double len, const Mat2R& frame, const Mat2R& w) {
        Cell c;
        c.kind = Kind::Dirac;
        c.len = len;
        c.frame = frame;
        c.w = w;
        return c;
    }

    // N(s) = exp(J w s) frame for a Dirac cell, s relative to the cell start.
    Mat2R dirac_frame_at(double s) const;

    // H at offset s in [0, len].
    Mat2R h_at(double s) const;

    // Exact integral of H over [s0, s1] within the cell.
    Mat2R integral(double s0, double s1) const;

    // sqrt(det H), constant across the cell.
    double sqrt_det() const;
};

// Piecewise Hamiltonian: ordered cells plus a constant tail on [ell, infinity).
struct PiecewiseHamiltonian {
    std::vector<Cell> cells;
    Mat2R tail;

    double ell() const {
        double t = 0;
        for (const auto& c : cells) t += c.len;
        return t;
    }
    // Cell boundaries 0 = t_0 < t_1 < ... < t_n = ell.
    std::vector<double> boundaries() const;
    // H at time t >= 0 (right-continuous; the tail beyond ell).
    Mat2R h_at(double t) const;
    // Exact integral of H over [t0, t1], 0 <= t0 <= t1.
    Mat2R integral(double t0, double t1) const;
};

enum class HamiltonianClass { ValidNontrivialSingular, Trivial, Invalid };

struct ValidationResult {
    HamiltonianClass cls;
    std::string reason;  // first violated predicate when Invalid
    bool valid() const { return cls == HamiltonianClass::ValidNontrivialSingular; }
};

// Classifies H against conditions (a),(b): every piece PSD with positive
// trace, tail trace positive (singularity), and the rank-1-proportional
// triviality test. Total function: never throws.
ValidationResult validate(const PiecewiseHamiltonian& h);

// Throws InvalidHamiltonian unless valid-nontrivial-singular.
void require_valid(const PiecewiseHamiltonian& h);

// Piecewise-linear determinant clock xi(t) = int_0^t sqrt(det H) and its
// leftmost inverse eta.
struct XiProfile {
    std::vector<double> breakpoints;  // cell boundaries, ending at ell
    std::vector<double> xi_values;    // xi at the breakpoints
    std::vector<double> slopes;       // sqrt(det H) per cell segment
    double tail_slope = 0.0;          // sqrt(det tail)

    double xi(double t) const;
    // Leftmost preimage eta(x) = min { t >= 0 : xi(t) = x }.
    // Throws EtaUnreachable when xi saturates below x.
    double eta(double x) const;
};

XiProfile xi_eta(const PiecewiseHamiltonian& h);

// Conjugation H -> A^T H A by A in SL(2,R); preserves det cellwise.
PiecewiseHamiltonian conjugate_sl2(const PiecewiseHamiltonian& h, const Mat2R& a);

// Dual Hamiltonian J^T H J.
PiecewiseHamiltonian dual(const PiecewiseHamiltonian& h);

// Equivalent Hamiltonian with det == 1: cell lengths scale by sqrt(det H),
// matrices by 1/sqrt(det H). Requires det > 0 on every piece.
PiecewiseHamiltonian renormalize_det1(const PiecewiseHamiltonian& h);

// Exact lossless split so that r becomes a cell boundary (no-op if it is one,
// or if r >= ell).
PiecewiseHamiltonian split_at(const PiecewiseHamiltonian& h, double r);

// The Hamiltonian shifted by r: t -> H(t + r). r is made a boundary first.
PiecewiseHamiltonian shift(const PiecewiseHamiltonian& h, double r);

// Bernstein-Szego approximation: equals H on [0,r), constant
// (1/I, R/I; R/I, (I^2+R^2)/I) afterwards, built from m_r(i) = R + iI.
// Declared here with the model; the definition lives with the solver.
PiecewiseHamiltonian bernstein_szego(const PiecewiseHamiltonian& h, double r);

}  // namespace chs
