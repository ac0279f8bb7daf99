#include "chs/krein.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "chs/quadrature.hpp"

namespace chs {

namespace {

struct Vec2C {
    cdouble a, b;
};

// System matrix Omega(r, z) for the state (P*, P), including the e^{2iu}
// integrating phase.
struct Omega {
    cdouble m11, m12, m21, m22;
};

Omega omega_of(cdouble alpha, cdouble beta, double g, double u, cdouble z) {
    const cdouble phase = std::exp(cdouble(0, 2.0 * u));
    const cdouble f = phase * (alpha + z * beta);
    const cdouble ftld = (std::conj(alpha) + z * std::conj(beta)) / phase;
    const cdouble iz = cdouble(0, 1) * z;
    return {-iz * g, f, ftld, iz * (2.0 + g)};
}

Vec2C apply(const Omega& o, const Vec2C& x) {
    return {o.m11 * x.a + o.m12 * x.b, o.m21 * x.a + o.m22 * x.b};
}

// Largest eigenvalue of the Hermitian part (Omega + Omega^*)/2.
double herm_lambda_max(const Omega& o) {
    const double a = o.m11.real();
    const double b = o.m22.real();
    const cdouble c = 0.5 * (o.m12 + std::conj(o.m21));
    return 0.5 * (a + b) + std::sqrt(0.25 * (a - b) * (a - b) + std::norm(c));
}

double norm2(const Vec2C& x) { return std::sqrt(std::norm(x.a) + std::norm(x.b)); }

}  // namespace

double KreinCoefficients::phase_u(double r) const {
    if (r <= 0) return 0.0;
    const double hi = std::min(r, extent);
    if (hi <= 0) return 0.0;
    std::vector<double> parts;
    for (const auto& p : pieces) {
        const double lo = p.t0, up = std::min(hi, p.t1);
        if (up <= lo) continue;
        if (p.eval == nullptr) {
            parts.push_back(p.tv_c * (up - lo));
        } else {
            auto tv = [&](double t) {
                cdouble a, b;
                double g, v;
                p.at(t, a, b, g, v);
                return v;
            };
            const int panels = std::max(1, static_cast<int>(std::ceil((up - lo) * 4)));
            parts.push_back(quad::gauss_legendre(tv, lo, up, panels));
        }
    }
    return -0.5 * quad::pairwise_sum(std::move(parts));
}

KreinCoefficients krein_coefficients(const FactorizationTriple& f) {
    auto fp = std::make_shared<FactorizationTriple>(f);
    KreinCoefficients c;
    c.extent = f.extent;
    c.g0 = f.G_at(0.0);

    // split the factorization pieces at their interior jump points
    for (const auto& p : f.pieces) {
        std::vector<double> cuts{p.t0, p.t1};
        for (double b : f.smooth_breaks)
            if (b > p.t0 + 1e-13 && b < p.t1 - 1e-13) cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            KreinCoefficients::Piece kp;
            kp.t0 = cuts[i];
            kp.t1 = cuts[i + 1];
            if (p.constant) {
                const Mat2R v = p.V1c + p.V2c;
                kp.alpha_c = cdouble(-v.a12, 0.5 * (v.a11 - v.a22));
                kp.beta_c = cdouble(p.Qc.a12, -0.5 * (p.Qc.a11 - p.Qc.a22));
                kp.g_c = 0.5 * p.Qc.trace() - 1.0;
                kp.tv_c = v.trace();
                kp.constant = std::abs(kp.tv_c) < 1e-14;
            } else {
                kp.constant = false;
                kp.eval = [fp](double r, cdouble& alpha, cdouble& beta, double& g, double& tv) {
                    Mat2R q, v1, v2;
                    fp->QV_at(r, q, v1, v2);
                    const Mat2R v = v1 + v2;
                    alpha = cdouble(-v.a12, 0.5 * (v.a11 - v.a22));
                    beta = cdouble(q.a12, -0.5 * (q.a11 - q.a22));
                    g = 0.5 * q.trace() - 1.0;
                    tv = v.trace();
                };
            }
            c.pieces.push_back(std::move(kp));
        }
    }
    return c;
}

KreinCoefficients dual_coefficients(const KreinCoefficients& c) {
    KreinCoefficients d = c;
    d.g0 = J2.transpose() * c.g0 * J2;
    for (auto& p : d.pieces) {
        if (p.eval == nullptr) {
            p.alpha_c = -p.alpha_c;
            p.beta_c = -p.beta_c;
        } else {
            auto base = p.eval;
            p.eval = [base](double r, cdouble& alpha, cdouble& beta, double& g, double& tv) {
                base(r, alpha, beta, g, tv);
                alpha = -alpha;
                beta = -beta;
            };
        }
    }
    return d;
}

std::pair<cdouble, cdouble> krein_init(const KreinCoefficients& c) {
    return {cdouble(c.g0.a11, c.g0.a21), cdouble(c.g0.a11, -c.g0.a21)};
}

KreinPath propagate_krein(const KreinCoefficients& c, cdouble z, double r_max,
                          std::pair<cdouble, cdouble> init, double rk_step,
                          std::vector<double> record_at) {
    if (rk_step < 1e-9) throw StepUnderflow("propagate_krein: step below 1e-9");
    std::vector<double> marks{0.0, r_max};
    for (const auto& p : c.pieces) {
        if (p.t0 < r_max) marks.push_back(p.t0);
        if (p.t1 < r_max) marks.push_back(p.t1);
    }
    for (double t : record_at)
        if (t >= 0 && t <= r_max) marks.push_back(t);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-13; }),
                marks.end());

    Vec2C x{init.first, init.second};
    const double x0n = norm2(x);
    double u = 0.0;       // running phase -1/2 int trace V
    double gron_acc = 0;  // int of lambda_max((Omega+Omega*)/2)
    KreinPath path;
    path.gronwall_margin = 1e300;
    path.states.push_back({0.0, x.a, x.b, 0.0});

    auto piece_at = [&](double t) -> const KreinCoefficients::Piece* {
        for (const auto& p : c.pieces)
            if (t >= p.t0 - 1e-13 && t < p.t1 - 1e-13) return &p;
        return nullptr;
    };

    for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
        const double a = marks[i], b = marks[i + 1];
        if (b <= a) continue;
        const KreinCoefficients::Piece* p = piece_at(0.5 * (a + b));
        if (p == nullptr) {
            // beyond the coefficients: f = g = 0, P* constant, P picks e^{2izr}
            x.b *= std::exp(cdouble(0, 2) * z * (b - a));
            gron_acc += std::max(0.0, -2.0 * z.imag()) * (b - a);
        } else if (p->constant) {
            cdouble alpha, beta;
            double g, tv;
            p->at(0.5 * (a + b), alpha, beta, g, tv);
            const Omega om = omega_of(alpha, beta, g, u, z);
            const double dt = b - a;
            // trace Omega = 2 i z; split off the scalar part for a trace-free exponential
            const cdouble iz = cdouble(0, 1) * z;
            const Mat2C gen{(om.m11 - iz) * dt, om.m12 * dt, om.m21 * dt, (om.m22 - iz) * dt};
            const Mat2C e = expm_tracefree(gen) * std::exp(iz * dt);
            x = {e.a11 * x.a + e.a12 * x.b, e.a21 * x.a + e.a22 * x.b};
            gron_acc += herm_lambda_max(om) * dt;
            // constant pieces have trace V = 0, so u is unchanged
        } else {
            const int nsub = std::max(1, static_cast<int>(std::ceil((b - a) / rk_step)));
            const double h = (b - a) / nsub;
            struct State {
                Vec2C x;
                double u;
            };
            auto rhs = [&](double t, const State& s) {
                cdouble alpha, beta;
                double g, tv;
                p->at(std::min(t, p->t1 - 1e-15), alpha, beta, g, tv);
                const Omega om = omega_of(alpha, beta, g, s.u, z);
                return State{apply(om, s.x), -0.5 * tv};
            };
            State s{x, u};
            for (int k = 0; k < nsub; ++k) {
                const double t = a + k * h;
                const State k1 = rhs(t, s);
                const State k2 = rhs(t + 0.5 * h,
                                     {{s.x.a + 0.5 * h * k1.x.a, s.x.b + 0.5 * h * k1.x.b},
                                      s.u + 0.5 * h * k1.u});
                const State k3 = rhs(t + 0.5 * h,
                                     {{s.x.a + 0.5 * h * k2.x.a, s.x.b + 0.5 * h * k2.x.b},
                                      s.u + 0.5 * h * k2.u});
                const State k4 = rhs(t + h,
                                     {{s.x.a + h * k3.x.a, s.x.b + h * k3.x.b}, s.u + h * k3.u});
                s.x = {s.x.a + h / 6.0 * (k1.x.a + 2.0 * k2.x.a + 2.0 * k3.x.a + k4.x.a),
                       s.x.b + h / 6.0 * (k1.x.b + 2.0 * k2.x.b + 2.0 * k3.x.b + k4.x.b)};
                s.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
                cdouble alpha, beta;
                double g, tv;
                p->at(t + 0.5 * h, alpha, beta, g, tv);
                gron_acc += herm_lambda_max(omega_of(alpha, beta, g, s.u, z)) * h;
            }
            x = s.x;
            u = s.u;
        }
        const double bound = x0n * std::exp(gron_acc);
        path.gronwall_margin = std::min(path.gronwall_margin, bound * (1.0 + 1e-8) - norm2(x));
        if (norm2(x) > bound * (1.0 + 1e-8)) path.gronwall_ok = false;
        path.states.push_back({b, x.a, x.b, u});
    }
    return path;
}

std::pair<cdouble, cdouble> theta_tilde(const PiecewiseHamiltonian& h,
                                        const FactorizationTriple& f, double r, cdouble z) {
    const Mat2C m = transfer(h, r, z).m;
    const Mat2C g(f.G_at(r));
    const cdouble tp = g.a11 * m.a11 + g.a12 * m.a21;
    const cdouble tm = g.a21 * m.a11 + g.a22 * m.a21;
    return {tp, tm};
}

cdouble pstar_via_theta(const PiecewiseHamiltonian& h, const FactorizationTriple& f,
                        const KreinCoefficients& c, double r, cdouble z) {
    const auto [tp, tm] = theta_tilde(h, f, r, z);
    const double u = c.phase_u(r);
    return std::exp(cdouble(0, 1) * (r * z + cdouble(u, 0))) * (tp + cdouble(0, 1) * tm);
}

std::vector<double> density_via_pstar(const PiecewiseHamiltonian& h, const FactorizationTriple& f,
                                      double ell, const std::vector<double>& xs, double rk_step) {
    (void)h;
    const KreinCoefficients c = krein_coefficients(f);
    const auto init = krein_init(c);
    std::vector<double> w;
    w.reserve(xs.size());
    for (double x : xs) {
        const KreinPath path = propagate_krein(c, cdouble(x, 0.0), ell, init, rk_step);
        const cdouble ps = path.states.back().pstar;
        // Hermite-Biehler data has no real zeros; a vanishing modulus means
        // the factorization fed in is not one
        if (std::abs(ps) <= 1e-12)
            throw Error("density_via_pstar: |P*| fell below the minimum-modulus monitor");
        w.push_back(1.0 / std::norm(ps));
    }
    return w;
}

double outer_check(const std::function<double(double)>& pstar_sq, cdouble value_at_i,
                   double tol) {
    const double lhs = quad::poisson_i([&](double x) { return std::log(pstar_sq(x)); }, tol);
    const double rhs = 2.0 * std::log(std::abs(value_at_i));
    return std::abs(lhs - rhs);
}

double outer_check_fc(const PiecewiseHamiltonian& h, const FactorizationTriple& f, double ell) {
    const KreinCoefficients c = krein_coefficients(f);
    auto sq = [&](double x) {
        const auto [tp, tm] = theta_tilde(h, f, ell, cdouble(x, 0.0));
        return std::norm(tp + cdouble(0, 1) * tm);
    };
    const cdouble at_i = pstar_via_theta(h, f, c, ell, cdouble(0, 1));
    return outer_check(sq, at_i);
}

L44Audit l44_bounds_audit(const PiecewiseHamiltonian& h, const FactorizationTriple& f) {
    L44Audit audit;
    audit.norms = f.norms;
    const KreinCoefficients c = krein_coefficients(f);
    const KreinCoefficients cd = dual_coefficients(c);
    audit.a_diag = c.g0.a11;

    std::vector<double> rec;
    for (double t = 0; t <= f.extent; t += 0.125) rec.push_back(t);
    const KreinPath a = propagate_krein(c, cdouble(0, 1), std::max(f.extent, 1.0),
                                        krein_init(c), 1.0 / 4096, rec);
    const KreinPath b = propagate_krein(cd, cdouble(0, 1), std::max(f.extent, 1.0),
                                        krein_init(cd), 1.0 / 4096, rec);
    audit.gronwall_ok = a.gronwall_ok && b.gronwall_ok;
    for (std::size_t i = 0; i < a.states.size() && i < b.states.size(); ++i) {
        const double ps = std::abs(a.states[i].pstar);
        const double pd = std::abs(b.states[i].pstar);
        audit.sup_pstar_i = std::max(audit.sup_pstar_i, ps);
        audit.sup_product = std::max(audit.sup_product, ps * pd);
    }
    (void)h;
    return audit;
}

}  // namespace chs
