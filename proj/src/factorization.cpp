#include "chs/factorization.hpp"

#include <algorithm>
#include <cmath>

#include "chs/quadrature.hpp"
#include "chs/solver.hpp"

namespace chs {

namespace {

void require_det1(const PiecewiseHamiltonian& h, const char* who) {
    for (const auto& c : h.cells)
        if (std::abs(c.sqrt_det() - 1.0) > 1e-9)
            throw NotUnitDeterminant(std::string(who) + ": cell determinant differs from 1");
    if (std::abs(h.tail.det() - 1.0) > 1e-9)
        throw NotUnitDeterminant(std::string(who) + ": tail determinant differs from 1");
}

// Integral of f over [a, b] split at the given breakpoints; 16-point
// Gauss-Legendre per unit of length on each smooth segment.
double integrate_segmented(const std::function<double(double)>& f, double a, double b,
                           const std::vector<double>& breaks) {
    std::vector<double> cuts{a, b};
    for (double c : breaks)
        if (c > a && c < b) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> parts;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        if (hi <= lo) continue;
        const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) * 2)));
        parts.push_back(quad::gauss_legendre(f, lo, hi, panels));
    }
    return quad::pairwise_sum(std::move(parts));
}

std::vector<double> build_grid(const PiecewiseHamiltonian& h, double extent, double step) {
    std::vector<double> g;
    for (double t = 0; t < extent; t += step) g.push_back(t);
    g.push_back(extent);
    for (double b : h.boundaries())
        if (b <= extent) g.push_back(b);
    for (double n = 0; n <= extent; n += 1.0) g.push_back(n);  // eta_n = n for det 1
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-13; }),
            g.end());
    return g;
}

void sample_paths(FactorizationTriple& f) {
    f.G.clear();
    f.Q.clear();
    f.V1.clear();
    f.V2.clear();
    for (double t : f.grid) {
        f.G.push_back(f.G_at(t));
        Mat2R q, v1, v2;
        f.QV_at(t, q, v1, v2);
        f.Q.push_back(q);
        f.V1.push_back(v1);
        f.V2.push_back(v2);
    }
}

}  // namespace

void FactorizationTriple::QV_at(double t, Mat2R& q, Mat2R& v1, Mat2R& v2) const {
    if (t >= extent || pieces.empty()) {
        q = Mat2R::identity();
        v1 = Mat2R::zero();
        v2 = Mat2R::zero();
        return;
    }
    std::size_t lo = 0, hi = pieces.size();
    while (lo + 1 < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (pieces[mid].t0 <= t)
            lo = mid;
        else
            hi = mid;
    }
    const Piece& p = pieces[lo];
    if (p.constant) {
        q = p.Qc;
        v1 = p.V1c;
        v2 = p.V2c;
    } else {
        p.eval(t, q, v1, v2);
    }
}

TriangularStep triangular_step(const Mat2R& a, const Mat2R& b) {
    if (!is_positive_definite(a) || !is_positive_definite(b))
        throw NotPositiveDefinite("triangular_step: inputs must be positive definite");
    const Mat2R la = cholesky_upper(a);
    const Mat2R lai = la.inverse();
    const Mat2R c = lai.transpose() * b * lai;
    TriangularStep s;
    s.lambda_c = cholesky_upper(c);
    s.x = s.lambda_c.a11;
    s.y = s.lambda_c.a12;
    s.z = s.lambda_c.a22;
    s.delta = ((a + b) * 0.5).det() - 1.0;
    s.delta_hat = 0.5 * (s.x - s.z);
    return s;
}

FactorizationTriple factorize_oscillation(const PiecewiseHamiltonian& h, double grid_step) {
    require_valid(h);
    require_det1(h, "factorize_oscillation");
    const double ell = h.ell();
    const int n = static_cast<int>(std::ceil(ell));

    // Window averages H_k = int_k^{k+1} H and the Lambda recursion G_k = chol(H_k).
    std::vector<Mat2R> hw(n + 2);
    for (int k = 0; k <= n + 1; ++k) {
        hw[k] = h.integral(k, k + 1.0);
        if (!is_positive_definite(hw[k]))
            throw SingularWindow("factorize_oscillation: window average not positive definite");
    }
    std::vector<Mat2R> gk(n + 1);
    std::vector<TriangularStep> steps(n);
    gk[0] = cholesky_upper(hw[0]);
    for (int k = 0; k < n; ++k) {
        steps[k] = triangular_step(hw[k], hw[k + 1]);
        gk[k + 1] = steps[k].lambda_c * gk[k];
    }

    auto hp = std::make_shared<PiecewiseHamiltonian>(h);
    FactorizationTriple f;
    f.extent = n;

    const Mat2R g_end = n > 0 ? gk[n] : gk[0];
    // det G_k = sqrt(det H_k); normalize so that det G(t) = 1.
    auto normalized = [](const Mat2R& g) {
        return g * (1.0 / std::sqrt(g.det()));
    };

    for (int k = 0; k < n; ++k) {
        FactorizationTriple::Piece p;
        p.t0 = k;
        p.t1 = k + 1.0;
        const Mat2R gn = gk[k];
        const Mat2R gn_inv = gn.inverse();
        const double x = steps[k].x, y = steps[k].y, z = steps[k].z;
        const double eps_k = steps[k].delta;
        const bool zeta = eps_k < 0.25;  // fixed threshold in the Lemma 9.5 split
        const double detgn = gn.det();
        p.constant = std::abs(x - 1) + std::abs(y) + std::abs(z - 1) < 1e-14 && eps_k < 1e-14;
        if (p.constant) {
            p.Qc = Mat2R::identity();
            p.V1c = Mat2R::zero();
            p.V2c = Mat2R::zero();
        }
        p.eval = [hp, k, gn, gn_inv, x, y, z, zeta, detgn](double t, Mat2R& q, Mat2R& v1,
                                                           Mat2R& v2) {
            const double s = t - k;
            const double alpha = 1.0 - s + s * x;
            const double gamma = 1.0 - s + s * z;
            const double u = 1.0 / alpha, v = 1.0 / gamma;
            // T = G_k g^{-1}(t) = (I + s(Lambda - I))^{-1}
            const Mat2R tmat{u, -s * y * u * v, 0.0, v};
            const Mat2R qn = gn_inv.transpose() * hp->h_at(t) * gn_inv;
            q = (tmat.transpose() * qn * tmat) * (alpha * gamma * detgn);
            const double za = (x - 1.0) * u, zd = (z - 1.0) * v, zb = y * u * v;
            // V = -J (Z - (trace Z / 2) I), symmetric
            const double off = 0.5 * (zd - za);
            if (zeta) {
                v2 = Mat2R{0.0, -za, -za, -zb};
                v1 = Mat2R{0.0, off + za, off + za, 0.0};
            } else {
                v2 = Mat2R::zero();
                v1 = Mat2R{0.0, off, off, -zb};
            }
        };
        f.pieces.push_back(std::move(p));
    }

    f.G_eval = [pieces_gk = gk, steps, n, g_end, normalized](double t) {
        if (n == 0) return normalized(g_end);
        if (t <= 0) return normalized(pieces_gk[0]);
        if (t >= n) return normalized(g_end);
        const int k = std::min(static_cast<int>(std::floor(t)), n - 1);
        const double s = t - k;
        const double x = steps[k].x, y = steps[k].y, z = steps[k].z;
        const Mat2R interp{1.0 - s + s * x, s * y, 0.0, 1.0 - s + s * z};
        const Mat2R g = interp * pieces_gk[k];
        return normalized(g);
    };

    f.smooth_breaks = h.boundaries();
    f.grid = build_grid(h, std::max<double>(f.extent, 1.0), grid_step);
    sample_paths(f);
    f.norms = compute_norms(f, h);
    return f;
}

namespace {

// Weyl data I_H(r), R_H(r) and centered finite-difference derivatives with
// one Richardson extrapolation, stencils kept inside the cell containing r.
struct WeylData {
    double I, R, dI, dR;
};

WeylData weyl_data_at(const PiecewiseHamiltonian& h, double r, double fd_step) {
    const cdouble i1(0.0, 1.0);
    auto ir = [&](double t) { return weyl_at_r(h, std::max(0.0, t), i1); };
    const cdouble m = ir(r);
    WeylData wd{m.imag(), m.real(), 0.0, 0.0};

    // clamp the stencil inside the containing cell
    const auto bs = h.boundaries();
    double lo = 0.0, hi = h.ell() + 4.0 * fd_step + 1.0;
    for (std::size_t j = 0; j + 1 < bs.size(); ++j)
        if (r >= bs[j] && r < bs[j + 1]) {
            lo = bs[j];
            hi = bs[j + 1];
            break;
        }
    if (r >= h.ell()) {
        wd.dI = wd.dR = 0.0;  // constant tail
        return wd;
    }
    double step = fd_step;
    const double len = hi - lo;
    if (len < 8.0 * step) step = len / 8.0;
    const double rc = std::min(std::max(r, lo + 2.0 * step), hi - 2.0 * step);

    auto centered = [&](double hh, double& di, double& dr) {
        const cdouble mp = ir(rc + hh), mm = ir(rc - hh);
        di = (mp.imag() - mm.imag()) / (2.0 * hh);
        dr = (mp.real() - mm.real()) / (2.0 * hh);
    };
    double di1, dr1, di2, dr2;
    centered(step, di1, dr1);
    centered(0.5 * step, di2, dr2);
    wd.dI = (4.0 * di2 - di1) / 3.0;
    wd.dR = (4.0 * dr2 - dr1) / 3.0;
    if (std::abs(wd.dI - di2) > 1e-4 * (1.0 + std::abs(wd.dI)) ||
        std::abs(wd.dR - dr2) > 1e-4 * (1.0 + std::abs(wd.dR)))
        throw DerivativeUnstable("factorize_spectral: Richardson disagreement for I', R'");
    return wd;
}

// H entry used for the S1/S2 split membership; jump points resolved by the
// left cell (measure-zero choice).
Mat2R h_for_split(const PiecewiseHamiltonian& h, double t) {
    for (double b : h.boundaries())
        if (t > 0 && std::abs(t - b) < 1e-12) return h.h_at(t - 1e-12 * (1.0 + t));
    return h.h_at(t);
}

}  // namespace

FactorizationTriple factorize_spectral(const PiecewiseHamiltonian& h, double fd_step,
                                       double grid_step) {
    require_valid(h);
    require_det1(h, "factorize_spectral");
    if (!is_positive_definite(h.tail))
        throw NotPositiveDefinite("factorize_spectral: tail not positive definite");
    auto hp = std::make_shared<PiecewiseHamiltonian>(h);
    FactorizationTriple f;
    f.extent = h.ell();

    const auto bs = h.boundaries();
    for (std::size_t j = 0; j + 1 < bs.size(); ++j) {
        FactorizationTriple::Piece p;
        p.t0 = bs[j];
        p.t1 = bs[j + 1];
        p.constant = false;
        p.eval = [hp, fd_step](double t, Mat2R& q, Mat2R& v1, Mat2R& v2) {
            const WeylData wd = weyl_data_at(*hp, t, fd_step);
            const Mat2R hm = hp->h_at(t);  // right-continuous, matching H itself
            const double h1 = hm.a11, hh = hm.a12, h2 = hm.a22;
            const double I = wd.I, R = wd.R;
            q = Mat2R{I * h1, -R * h1 + hh, -R * h1 + hh, (R * R * h1 - 2.0 * R * hh + h2) / I};
            // jump points are assigned to the left cell in the split only
            const double ih1 = I * h_for_split(*hp, t).a11;
            const bool s1 = ih1 >= 0.5 && ih1 <= 2.0;
            const double g2 = s1 ? 0.5 * (ih1 - 1.0 / ih1) : 0.0;
            const double g1 = wd.dI / (2.0 * I) - g2;
            const double gt2 = s1 ? -wd.dR / I : 0.0;
            const double gt1 = s1 ? 0.0 : -wd.dR / I;
            v1 = Mat2R{0.0, g1, g1, gt1};
            v2 = Mat2R{0.0, g2, g2, gt2};
        };
        f.pieces.push_back(std::move(p));
    }

    f.G_eval = [hp](double t) {
        const cdouble m = weyl_at_r(*hp, std::min(std::max(t, 0.0), hp->ell()), cdouble(0, 1));
        const double I = m.imag(), R = m.real();
        const double s = std::sqrt(I);
        return Mat2R{1.0 / s, R / s, 0.0, s};
    };

    f.smooth_breaks = h.boundaries();
    f.grid = build_grid(h, std::max(f.extent, 1.0), grid_step);
    sample_paths(f);
    f.norms = compute_norms(f, h);
    return f;
}

FactorizationNorms compute_norms(const FactorizationTriple& f, const PiecewiseHamiltonian& h) {
    FactorizationNorms n;
    const auto breaks = h.boundaries();
    double v2sq = 0.0;
    for (const auto& p : f.pieces) {
        if (p.constant) {
            n.q += (p.Qc.trace() - 2.0) * (p.t1 - p.t0);
            n.v1 += op_norm(p.V1c) * (p.t1 - p.t0);
            v2sq += op_norm(p.V2c) * op_norm(p.V2c) * (p.t1 - p.t0);
            continue;
        }
        auto qf = [&](double t) {
            Mat2R q, v1, v2;
            p.eval(t, q, v1, v2);
            return q.trace() - 2.0;
        };
        auto v1f = [&](double t) {
            Mat2R q, v1, v2;
            p.eval(t, q, v1, v2);
            return op_norm(v1);
        };
        auto v2f = [&](double t) {
            Mat2R q, v1, v2;
            p.eval(t, q, v1, v2);
            const double s = op_norm(v2);
            return s * s;
        };
        n.q += integrate_segmented(qf, p.t0, p.t1, breaks);
        n.v1 += integrate_segmented(v1f, p.t0, p.t1, breaks);
        v2sq += integrate_segmented(v2f, p.t0, p.t1, breaks);
    }
    n.v2 = std::sqrt(std::max(v2sq, 0.0));
    return n;
}

FactorizationVerification verify_factorization(const PiecewiseHamiltonian& h,
                                               const FactorizationTriple& f) {
    FactorizationVerification rep;
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        const double t = f.grid[i];
        const Mat2R g = f.G[i], q = f.Q[i], v = f.V1[i] + f.V2[i];
        rep.residual_h = std::max(rep.residual_h, max_abs_entry(h.h_at(t) - g.transpose() * q * g));
        rep.residual_det_g = std::max(rep.residual_det_g, std::abs(g.det() - 1.0));
        rep.residual_det_q = std::max(rep.residual_det_q, std::abs(q.det() - 1.0));
        double lo, hi;
        sym_eigenvalues(q, lo, hi);
        rep.min_eig_q = std::min(rep.min_eig_q, lo);
        rep.residual_sym_v = std::max(rep.residual_sym_v, std::abs(v.a12 - v.a21));
    }
    // G' = J V G at interior points of each smooth piece
    const double d = 1e-5;
    for (const auto& p : f.pieces) {
        for (int k = 1; k <= 5; ++k) {
            const double t = p.t0 + (p.t1 - p.t0) * k / 6.0;
            if (t - d < p.t0 || t + d > p.t1) continue;
            const Mat2R dg = (f.G_at(t + d) - f.G_at(t - d)) * (1.0 / (2.0 * d));
            Mat2R q, v1, v2;
            f.QV_at(t, q, v1, v2);
            const Mat2R rhs = J2 * (v1 + v2) * f.G_at(t);
            rep.residual_ode = std::max(rep.residual_ode, max_abs_entry(dg - rhs));
        }
    }
    rep.norms = compute_norms(f, h);
    return rep;
}

NormalizedFactorization normalize_l18(const PiecewiseHamiltonian& h,
                                      const FactorizationTriple& f) {
    const Mat2R g0 = f.G_at(0.0);
    const Mat2R a0 = g0.inverse();
    const cdouble m = weyl_fc(h, cdouble(0, 1)).m;
    // m_{A}(i) = (d m + b)/(c m + a) for conjugation by A = (a, b; c, d)
    const cdouble m0 = (a0.a22 * m + a0.a12) / (a0.a21 * m + a0.a11);
    const double I = m0.imag(), R = m0.real();
    if (!(I > 0)) throw Error("normalize_l18: Im m(i) not positive after G^{-1}(0)");
    const double dd = (I + 1.0) / std::sqrt(I * (R * R + (I + 1.0) * (I + 1.0)));
    const double aa = dd * (I + R * R / (1.0 + I));
    const double bb = -dd * R / (1.0 + I);
    const Mat2R b{aa, bb, bb, dd};

    // rotation diagonalizing B with the smaller eigenvalue first
    const double theta = 0.5 * std::atan2(-2.0 * b.a12, b.a11 - b.a22);
    Mat2R cphi{std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta)};
    Mat2R d0 = cphi.transpose() * b * cphi;
    if (d0.a11 > d0.a22) {
        const Mat2R quarter{0.0, 1.0, -1.0, 0.0};  // rotation by pi/2 swaps the axes
        cphi = cphi * quarter;
        d0 = cphi.transpose() * b * cphi;
    }
    const Mat2R a = a0 * b * cphi;

    NormalizedFactorization out;
    out.a_matrix = a;
    out.h = conjugate_sl2(h, a);
    out.a_diag = d0.a11;

    FactorizationTriple fa;
    fa.extent = f.extent;
    const Mat2R cphiT = cphi.transpose();
    for (const auto& p : f.pieces) {
        FactorizationTriple::Piece np;
        np.t0 = p.t0;
        np.t1 = p.t1;
        np.constant = p.constant;
        if (p.constant) {
            np.Qc = cphiT * p.Qc * cphi;
            np.V1c = cphiT * p.V1c * cphi;
            np.V2c = cphiT * p.V2c * cphi;
        }
        np.eval = [p, cphi, cphiT](double t, Mat2R& q, Mat2R& v1, Mat2R& v2) {
            Mat2R q0, v10, v20;
            if (p.constant) {
                q0 = p.Qc;
                v10 = p.V1c;
                v20 = p.V2c;
            } else {
                p.eval(t, q0, v10, v20);
            }
            q = cphiT * q0 * cphi;
            v1 = cphiT * v10 * cphi;
            v2 = cphiT * v20 * cphi;
        };
        fa.pieces.push_back(std::move(np));
    }
    fa.G_eval = [base = f.G_eval, cphiT, a](double t) { return cphiT * base(t) * a; };
    fa.smooth_breaks = f.smooth_breaks;
    fa.grid = f.grid;
    sample_paths(fa);
    fa.norms = compute_norms(fa, out.h);
    out.f = std::move(fa);
    return out;
}

TruncatedPair truncate_factorized(const PiecewiseHamiltonian& h, const FactorizationTriple& f,
                                  double ell_prime) {
    bool on_grid = false;
    for (double t : f.grid)
        if (std::abs(t - ell_prime) < 1e-12) on_grid = true;
    if (!on_grid) throw GridMismatch("truncate_factorized: ell' is not a grid point");

    TruncatedPair out;
    const Mat2R gl = f.G_at(ell_prime);
    const PiecewiseHamiltonian hs = split_at(h, ell_prime);
    out.h.tail = gl.transpose() * gl;
    double a = 0;
    for (const auto& c : hs.cells) {
        if (a + c.len <= ell_prime + 1e-13) out.h.cells.push_back(c);
        a += c.len;
        if (a >= ell_prime - 1e-13 && out.h.ell() >= ell_prime - 1e-13) break;
    }

    FactorizationTriple ft;
    ft.extent = std::min(f.extent, ell_prime);
    for (const auto& p : f.pieces) {
        if (p.t0 >= ell_prime) break;
        FactorizationTriple::Piece np = p;
        np.t1 = std::min(p.t1, ell_prime);
        ft.pieces.push_back(std::move(np));
    }
    ft.G_eval = [base = f.G_eval, ell_prime, gl](double t) {
        return t >= ell_prime ? gl : base(t);
    };
    for (double t : f.smooth_breaks)
        if (t <= ell_prime + 1e-13) ft.smooth_breaks.push_back(t);
    ft.grid.clear();
    for (double t : f.grid)
        if (t <= ell_prime + 1e-13) ft.grid.push_back(std::min(t, ell_prime));
    sample_paths(ft);
    ft.norms = compute_norms(ft, out.h);
    out.f = std::move(ft);
    return out;
}

}  // namespace chs
