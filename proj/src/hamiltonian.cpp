#include "chs/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

namespace chs {

namespace {

// Orthonormal eigenpair of the symmetric trace-free matrix J w = (p, q; q, -p):
// eigenvalues +-rho. Written with outer products so exp(J w s) stays stable
// for large rho*s (no cosh/sinh cancellation).
struct JwEigen {
    double rho = 0.0;
    double u1 = 1.0, u2 = 0.0;  // unit eigenvector for +rho
};

JwEigen jw_eigen(const Mat2R& w) {
    // For symmetric trace-free w, J w = ((a, b),(b, -a)) is again symmetric.
    const Mat2R jw = J2 * w;
    const double a = jw.a11, b = jw.a12;  // jw = ((a, b),(b, -a))
    JwEigen e;
    e.rho = std::hypot(a, b);
    if (e.rho == 0.0) return e;
    double v1, v2;
    if (a >= 0) {
        v1 = e.rho + a;
        v2 = b;
    } else {
        v1 = b;
        v2 = e.rho - a;
    }
    const double n = std::hypot(v1, v2);
    e.u1 = v1 / n;
    e.u2 = v2 / n;
    return e;
}

// exp(J w s) = e^{rho s} u u^T + e^{-rho s} v v^T with v = (-u2, u1).
Mat2R exp_jw(const JwEigen& e, double s) {
    if (e.rho == 0.0) return Mat2R::identity();
    const double ep = std::exp(e.rho * s), em = std::exp(-e.rho * s);
    return {ep * e.u1 * e.u1 + em * e.u2 * e.u2, (ep - em) * e.u1 * e.u2,
            (ep - em) * e.u1 * e.u2, ep * e.u2 * e.u2 + em * e.u1 * e.u1};
}

bool rank_le_1(const Mat2R& m) {
    const double t = std::abs(m.trace());
    return std::abs(m.det()) <= 1e-12 * (1.0 + t * t);
}

bool proportional(const Mat2R& a, const Mat2R& b) {
    const double scale = 1e-12 * (1.0 + a.trace() * b.trace());
    return std::abs(a.a11 * b.a12 - a.a12 * b.a11) <= scale &&
           std::abs(a.a11 * b.a22 - a.a22 * b.a11) <= scale &&
           std::abs(a.a12 * b.a22 - a.a22 * b.a12) <= scale;
}

}  // namespace

Mat2R Cell::dirac_frame_at(double s) const {
    return exp_jw(jw_eigen(w), s) * frame;
}

Mat2R Cell::h_at(double s) const {
    if (kind == Kind::Constant) return h;
    const Mat2R n = dirac_frame_at(s);
    return n.transpose() * n;
}

Mat2R Cell::integral(double s0, double s1) const {
    if (kind == Kind::Constant) return h * (s1 - s0);
    // N(s)^T N(s) = exp(2 J w s); integrate each eigen mode exactly.
    const JwEigen e = jw_eigen(w);
    Mat2R core;
    if (e.rho == 0.0) {
        core = Mat2R::identity() * (s1 - s0);
    } else {
        const double d = 2.0 * e.rho;
        const double cp = std::exp(d * s0) * std::expm1(d * (s1 - s0)) / d;
        const double cm = std::exp(-d * s1) * std::expm1(d * (s1 - s0)) / d;
        core = {cp * e.u1 * e.u1 + cm * e.u2 * e.u2, (cp - cm) * e.u1 * e.u2,
                (cp - cm) * e.u1 * e.u2, cp * e.u2 * e.u2 + cm * e.u1 * e.u1};
    }
    return frame.transpose() * core * frame;
}

double Cell::sqrt_det() const {
    if (kind == Kind::Constant) return std::sqrt(std::max(h.det(), 0.0));
    return frame.det();  // det H = det(frame)^2, det(exp(Jws)) = 1
}

std::vector<double> PiecewiseHamiltonian::boundaries() const {
    std::vector<double> b;
    b.reserve(cells.size() + 1);
    double t = 0;
    b.push_back(0.0);
    for (const auto& c : cells) {
        t += c.len;
        b.push_back(t);
    }
    return b;
}

Mat2R PiecewiseHamiltonian::h_at(double t) const {
    double t0 = 0;
    for (const auto& c : cells) {
        if (t < t0 + c.len) return c.h_at(t - t0);
        t0 += c.len;
    }
    return tail;
}

Mat2R PiecewiseHamiltonian::integral(double t0, double t1) const {
    Mat2R acc = Mat2R::zero();
    double a = 0;
    for (const auto& c : cells) {
        const double b = a + c.len;
        const double lo = std::max(t0, a), hi = std::min(t1, b);
        if (hi > lo) acc = acc + c.integral(lo - a, hi - a);
        a = b;
    }
    if (t1 > a) acc = acc + tail * (t1 - std::max(t0, a));
    return acc;
}

ValidationResult validate(const PiecewiseHamiltonian& h) {
    for (std::size_t i = 0; i < h.cells.size(); ++i) {
        const Cell& c = h.cells[i];
        const std::string tag = "cell " + std::to_string(i);
        if (!(c.len > 0)) return {HamiltonianClass::Invalid, tag + " nonpositive length"};
        if (c.kind == Cell::Kind::Constant) {
            if (!is_symmetric(c.h)) return {HamiltonianClass::Invalid, tag + " not symmetric"};
            if (!is_psd(c.h)) return {HamiltonianClass::Invalid, tag + " not PSD"};
            if (!(c.h.trace() > 0)) return {HamiltonianClass::Invalid, tag + " trace not positive"};
        } else {
            if (!is_symmetric(c.w)) return {HamiltonianClass::Invalid, tag + " potential not symmetric"};
            if (std::abs(c.w.trace()) > 1e-12 * (1.0 + max_abs_entry(c.w)))
                return {HamiltonianClass::Invalid, tag + " potential not trace-free"};
            if (!(c.frame.det() > 0)) return {HamiltonianClass::Invalid, tag + " frame not orientation-positive"};
        }
    }
    if (!is_symmetric(h.tail)) return {HamiltonianClass::Invalid, "tail not symmetric"};
    if (!is_psd(h.tail)) return {HamiltonianClass::Invalid, "tail not PSD"};
    if (!(h.tail.trace() > 0)) return {HamiltonianClass::Invalid, "tail trace not positive (not singular)"};

    // Trivial iff every piece is (a multiple of) one rank-1 matrix. Dirac
    // cells have full rank, so any such cell makes H nontrivial.
    bool trivial = rank_le_1(h.tail);
    if (trivial) {
        for (const auto& c : h.cells) {
            if (c.kind != Cell::Kind::Constant || !rank_le_1(c.h) || !proportional(c.h, h.tail)) {
                trivial = false;
                break;
            }
        }
    }
    if (trivial) return {HamiltonianClass::Trivial, ""};
    return {HamiltonianClass::ValidNontrivialSingular, ""};
}

void require_valid(const PiecewiseHamiltonian& h) {
    const ValidationResult v = validate(h);
    if (v.cls == HamiltonianClass::Invalid) throw InvalidHamiltonian("invalid Hamiltonian: " + v.reason);
    if (v.cls == HamiltonianClass::Trivial) throw InvalidHamiltonian("trivial Hamiltonian");
}

double XiProfile::xi(double t) const {
    double x = 0, a = 0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double b = breakpoints[i + 1];
        if (t <= b) return x + slopes[i] * (t - a);
        x += slopes[i] * (b - a);
        a = b;
    }
    return x + tail_slope * (t - a);
}

double XiProfile::eta(double x) const {
    double xs = 0, a = 0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (x <= xs) return a;  // leftmost preimage
        const double b = breakpoints[i + 1];
        const double xe = xs + slopes[i] * (b - a);
        if (x <= xe) return a + (x - xs) / slopes[i];
        xs = xe;
        a = b;
    }
    if (x <= xs) return a;
    if (tail_slope <= 0) throw EtaUnreachable(x);
    return a + (x - xs) / tail_slope;
}

XiProfile xi_eta(const PiecewiseHamiltonian& h) {
    XiProfile p;
    p.breakpoints = h.boundaries();
    p.slopes.reserve(h.cells.size());
    p.xi_values.assign(1, 0.0);
    double x = 0;
    for (const auto& c : h.cells) {
        const double s = c.sqrt_det();
        p.slopes.push_back(s);
        x += s * c.len;
        p.xi_values.push_back(x);
    }
    p.tail_slope = std::sqrt(std::max(h.tail.det(), 0.0));
    return p;
}

PiecewiseHamiltonian conjugate_sl2(const PiecewiseHamiltonian& h, const Mat2R& a) {
    if (!is_sl2(a)) throw NotSL2("conjugate_sl2: |det A - 1| exceeds tolerance");
    PiecewiseHamiltonian r = h;
    for (auto& c : r.cells) {
        if (c.kind == Cell::Kind::Constant)
            c.h = a.transpose() * c.h * a;
        else
            c.frame = c.frame * a;
    }
    r.tail = a.transpose() * h.tail * a;
    return r;
}

PiecewiseHamiltonian dual(const PiecewiseHamiltonian& h) { return conjugate_sl2(h, J2); }

PiecewiseHamiltonian renormalize_det1(const PiecewiseHamiltonian& h) {
    PiecewiseHamiltonian r;
    r.cells.reserve(h.cells.size());
    for (const auto& c : h.cells) {
        const double sd = c.sqrt_det();
        if (sd <= 1e-12) throw DegenerateCell("renormalize_det1: cell with vanishing determinant");
        if (c.kind == Cell::Kind::Constant) {
            r.cells.push_back(Cell::constant(c.len * sd, c.h * (1.0 / sd)));
        } else {
            r.cells.push_back(Cell::dirac(c.len * sd, c.frame * (1.0 / std::sqrt(sd)), c.w * (1.0 / sd)));
        }
    }
    const double td = h.tail.det();
    if (td <= 1e-12) throw DegenerateCell("renormalize_det1: tail with vanishing determinant");
    r.tail = h.tail * (1.0 / std::sqrt(td));
    return r;
}

PiecewiseHamiltonian split_at(const PiecewiseHamiltonian& h, double r) {
    if (r <= 0) return h;
    PiecewiseHamiltonian out;
    out.tail = h.tail;
    double a = 0;
    bool done = false;
    for (const auto& c : h.cells) {
        const double b = a + c.len;
        if (!done && r > a && r < b) {
            const double s = r - a;
            if (c.kind == Cell::Kind::Constant) {
                out.cells.push_back(Cell::constant(s, c.h));
                out.cells.push_back(Cell::constant(c.len - s, c.h));
            } else {
                out.cells.push_back(Cell::dirac(s, c.frame, c.w));
                out.cells.push_back(Cell::dirac(c.len - s, c.dirac_frame_at(s), c.w));
            }
            done = true;
        } else {
            out.cells.push_back(c);
        }
        a = b;
    }
    return out;
}

PiecewiseHamiltonian shift(const PiecewiseHamiltonian& h, double r) {
    if (r <= 0) return h;
    const PiecewiseHamiltonian s = split_at(h, r);
    PiecewiseHamiltonian out;
    out.tail = s.tail;
    double a = 0;
    for (const auto& c : s.cells) {
        if (a >= r)
            out.cells.push_back(c);
        else if (a + c.len > r) {
            // r beyond every boundary match: keep the remainder (r was split to
            // a boundary above, so this only triggers for r >= ell rounding)
            Cell tailpc = c;
            tailpc.len = a + c.len - r;
            out.cells.push_back(tailpc);
        }
        a += c.len;
    }
    return out;
}

}  // namespace chs
