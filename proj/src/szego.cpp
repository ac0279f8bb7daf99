#include "chs/szego.hpp"

#include <cmath>
#include <limits>

#include "chs/quadrature.hpp"

namespace chs {

namespace {

void require_det1(const PiecewiseHamiltonian& h, const char* who) {
    for (const auto& c : h.cells) {
        const double sd = c.sqrt_det();
        if (std::abs(sd - 1.0) > 1e-9)
            throw NotUnitDeterminant(std::string(who) + ": cell determinant differs from 1");
    }
    if (std::abs(h.tail.det() - 1.0) > 1e-9)
        throw NotUnitDeterminant(std::string(who) + ": tail determinant differs from 1");
}

int cutoff_index(const PiecewiseHamiltonian& h) {
    const XiProfile p = xi_eta(h);
    return static_cast<int>(std::ceil(p.xi(h.ell()))) + 2;
}

// int_a^b 1/h11(t) dt, exact for constant cells, 64-point Gauss-Legendre per
// overlapped piece otherwise (the integrand is analytic there).
double integral_inv_h11(const PiecewiseHamiltonian& h, double t0, double t1) {
    double acc = 0;
    double a = 0;
    for (const auto& c : h.cells) {
        const double b = a + c.len;
        const double lo = std::max(t0, a), hi = std::min(t1, b);
        if (hi > lo) {
            if (c.kind == Cell::Kind::Constant) {
                acc += (hi - lo) / c.h.a11;
            } else {
                const double aa = a;
                acc += quad::gauss_legendre([&](double t) { return 1.0 / c.h_at(t - aa).a11; },
                                            lo, hi, 4);
            }
        }
        a = b;
    }
    if (t1 > a) acc += (t1 - std::max(t0, a)) / h.tail.a11;
    return acc;
}

}  // namespace

KtildeReport ktilde(const PiecewiseHamiltonian& h) {
    require_valid(h);
    const XiProfile p = xi_eta(h);
    KtildeReport rep;
    rep.n_cutoff = cutoff_index(h);
    std::vector<double> values;
    values.reserve(rep.n_cutoff);
    for (int n = 0; n < rep.n_cutoff; ++n) {
        const double a = p.eta(n);
        const double b = p.eta(n + 2.0);
        const double term = h.integral(a, b).det() - 4.0;
        rep.terms.push_back({n, term});
        values.push_back(term);
    }
    rep.total = quad::pairwise_sum(std::move(values));
    return rep;
}

double ktilde_a2(const PiecewiseHamiltonian& h) {
    require_valid(h);
    require_det1(h, "ktilde_a2");
    const int cutoff = cutoff_index(h);
    std::vector<double> values;
    values.reserve(cutoff);
    for (int n = 0; n < cutoff; ++n) {
        const Mat2R avg = h.integral(n, n + 2.0) * 0.5;
        // det H = 1 gives H^{-1} = -J H J, hence <H^{-1}> = -J <H> J.
        const Mat2R avg_inv = (J2 * avg * J2) * -1.0;
        const double nrm = op_norm(sqrt_psd(avg) * sqrt_psd(avg_inv));
        values.push_back(4.0 * (nrm * nrm - 1.0));
    }
    return quad::pairwise_sum(std::move(values));
}

DiagA2Pair diag_a2_bound(const PiecewiseHamiltonian& h) {
    require_valid(h);
    require_det1(h, "diag_a2_bound");
    const int cutoff = cutoff_index(h);
    std::vector<double> values;
    values.reserve(cutoff);
    for (int n = 0; n < cutoff; ++n) {
        const double ih = h.integral(n, n + 2.0).a11;
        const double ihinv = integral_inv_h11(h, n, n + 2.0);
        values.push_back(ih * ihinv - 4.0);
    }
    return {quad::pairwise_sum(std::move(values)), ktilde(h).total};
}

EntropyReport entropy_quadrature(const PiecewiseHamiltonian& h, double tol) {
    require_valid(h);
    if (!is_positive_definite(h.tail))
        throw NotPositiveDefinite("entropy_quadrature: tail not positive definite");
    EntropyReport rep;
    rep.method = EntropyReport::Method::Quadrature;
    rep.logI = std::log(weyl_fc(h, cdouble(0.0, 1.0)).I());
    rep.J = quad::poisson_i([&](double x) { return log_spectral_density_at(h, x); }, tol, 14,
                            nullptr, &rep.quadrature_error_estimate);
    rep.K = rep.logI - rep.J;
    return rep;
}

EntropyReport entropy_closed_report(const PiecewiseHamiltonian& h) {
    EntropyReport rep;
    rep.method = EntropyReport::Method::ClosedForm;
    rep.K = entropy_closed_form(h);
    rep.logI = std::log(weyl_fc(h, cdouble(0.0, 1.0)).I());
    rep.J = rep.logI - rep.K;
    return rep;
}

std::vector<std::pair<double, double>> entropy_profile(const PiecewiseHamiltonian& h,
                                                       const std::vector<double>& boundaries) {
    std::vector<std::pair<double, double>> out;
    out.reserve(boundaries.size());
    for (double r : boundaries) out.emplace_back(r, entropy_at_r(h, r));
    return out;
}

Theorem1Audit theorem1_audit(const PiecewiseHamiltonian& h) {
    Theorem1Audit a;
    a.K_m = entropy_closed_form(h);
    a.ktilde = ktilde(h).total;
    a.finiteness_violated = !(std::isfinite(a.K_m) == std::isfinite(a.ktilde));
    if (a.K_m > 0) {
        a.ratio = a.ktilde / a.K_m;
        a.exp_ratio = a.ktilde / (a.K_m * std::exp(a.K_m));
    }
    return a;
}

double fitted_growth_constant(double K, double kt) {
    if (kt <= 0) return 0.0;
    if (K <= 0) return std::numeric_limits<double>::infinity();
    auto f = [&](double c) { return c * K * std::exp(c * K) - kt; };
    double lo = 0.0, hi = 1.0;
    while (f(hi) < 0 && hi < 1e6) hi *= 2;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0 ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace chs
