#include "chs/models.hpp"

#include <cmath>
#include <memory>

namespace chs {

namespace {

void require_potential(const DiracPotential& v) {
    for (const auto& [len, w] : v.cells) {
        if (!(len > 0)) throw Error("dirac potential: nonpositive cell length");
        if (!is_symmetric(w)) throw NonTraceFree("dirac potential: not symmetric");
        if (std::abs(w.trace()) > 1e-12 * (1.0 + max_abs_entry(w)))
            throw NonTraceFree("dirac potential: trace not zero");
    }
}

}  // namespace

PiecewiseHamiltonian dirac_to_hamiltonian(const DiracPotential& v) {
    require_potential(v);
    PiecewiseHamiltonian h;
    Mat2R frame = Mat2R::identity();
    for (const auto& [len, w] : v.cells) {
        Cell c = Cell::dirac(len, frame, w);
        frame = c.dirac_frame_at(len);
        h.cells.push_back(std::move(c));
    }
    h.tail = frame.transpose() * frame;
    return h;
}

FactorizationTriple dirac_factorization(const DiracPotential& v, double grid_step) {
    const PiecewiseHamiltonian h = dirac_to_hamiltonian(v);
    FactorizationTriple f;
    f.extent = v.extent();
    double t = 0;
    for (const auto& [len, w] : v.cells) {
        FactorizationTriple::Piece p;
        p.t0 = t;
        p.t1 = t + len;
        p.constant = true;
        p.Qc = Mat2R::identity();
        p.V1c = Mat2R::zero();
        p.V2c = w;
        f.pieces.push_back(std::move(p));
        t += len;
    }
    auto hp = std::make_shared<PiecewiseHamiltonian>(h);
    f.G_eval = [hp](double s) {
        double a = 0;
        for (const auto& c : hp->cells) {
            if (s < a + c.len) return c.dirac_frame_at(s - a);
            a += c.len;
        }
        return hp->cells.empty() ? Mat2R::identity()
                                 : hp->cells.back().dirac_frame_at(hp->cells.back().len);
    };
    f.smooth_breaks = h.boundaries();
    std::vector<double> g;
    for (double s = 0; s < f.extent; s += grid_step) g.push_back(s);
    g.push_back(f.extent);
    for (double b : h.boundaries()) g.push_back(b);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(),
                        [](double x, double y) { return std::abs(x - y) < 1e-13; }),
            g.end());
    f.grid = std::move(g);
    for (double s : f.grid) {
        f.G.push_back(f.G_at(s));
        Mat2R q, v1, v2;
        f.QV_at(s, q, v1, v2);
        f.Q.push_back(q);
        f.V1.push_back(v1);
        f.V2.push_back(v2);
    }
    f.norms = compute_norms(f, h);
    return f;
}

cdouble Example1::m_of(cdouble z) const {
    return cdouble(0, 1) / (1.0 - cdouble(0, 1) * z * L);
}

Example1 example1(double L) {
    if (!(L >= 1)) throw Error("example1: L must be >= 1");
    Example1 e;
    e.L = L;
    e.h.cells.push_back(Cell::constant(L, Mat2R{1, 0, 0, 0}));
    e.h.tail = Mat2R::identity();
    e.ktilde = 2.0 * L;
    e.K = std::log1p(L);
    return e;
}

Example2 example2(double eps, int T) {
    if (!(eps > 0) || T < 1) throw Error("example2: need eps > 0 and T >= 1");
    Example2 e;
    e.eps = eps;
    e.T = T;
    e.regime_warning = eps > 0.5 || eps * T < 10.0 / eps;

    DiracPotential v;
    v.cells.assign(1, {static_cast<double>(T), Mat2R{0, eps, eps, 0}});
    e.h = dirac_to_hamiltonian(v);
    e.factorization = dirac_factorization(v);

    // (T-1) identical interior windows plus the straddling window [T-1, T+1]
    const double a = (1.0 - std::exp(-4.0 * eps)) * (std::exp(4.0 * eps) - 1.0) / (4.0 * eps * eps);
    const double b = ((std::exp(2.0 * eps) - 1.0) / (2.0 * eps) + 1.0) *
                     ((1.0 - std::exp(-2.0 * eps)) / (2.0 * eps) + 1.0);
    e.ktilde_closed = (T - 1.0) * (a - 4.0) + (b - 4.0);
    return e;
}

cdouble Example2::pstar_closed(double r, double x) const {
    const cdouble ix(0, x);
    const cdouble root = std::sqrt(cdouble(eps * eps - x * x, 0.0));
    const cdouble mu_p = ix + root, mu_m = ix - root;
    const cdouble den = mu_p - mu_m;
    return (eps + mu_p) / den * std::exp(mu_m * r) - (eps + mu_m) / den * std::exp(mu_p * r);
}

Example3 example3(const std::vector<std::pair<double, double>>& v_cells) {
    Example3 e;
    DiracPotential v;
    double l2 = 0;
    for (const auto& [len, val] : v_cells) {
        v.cells.push_back({len, Mat2R{val, 0, 0, -val}});
        l2 += val * val * len;
    }
    e.h = dirac_to_hamiltonian(v);
    e.factorization = dirac_factorization(v);
    e.v2_norm = std::sqrt(l2);
    return e;
}

}  // namespace chs
