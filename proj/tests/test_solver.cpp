#include <doctest.h>

#include "chs/hamiltonian.hpp"
#include "chs/solver.hpp"
#include "oracles.hpp"

using namespace chs;

namespace {

PiecewiseHamiltonian example1_h(double L) {
    PiecewiseHamiltonian h;
    h.cells.push_back(Cell::constant(L, Mat2R{1, 0, 0, 0}));
    h.tail = Mat2R::identity();
    return h;
}

PiecewiseHamiltonian identity_h() {
    PiecewiseHamiltonian h;
    h.tail = Mat2R::identity();
    return h;
}

}  // namespace

TEST_CASE("transfer closed forms") {
    // rank-1 plateau: M = (1, 0; -z t, 1)
    const auto h = example1_h(10);
    const cdouble z(0.7, 1.3);
    const auto tm = transfer(h, 4.0, z);
    CHECK(std::abs(tm.m.a11 - 1.0) < 1e-14);
    CHECK(std::abs(tm.m.a12) < 1e-14);
    CHECK(std::abs(tm.m.a21 + z * 4.0) < 1e-14);
    CHECK(std::abs(tm.m.a22 - 1.0) < 1e-14);

    CHECK(max_abs_entry(transfer(h, 0.0, z).m - Mat2C::identity()) == 0.0);

    // H = I at real z = x: rotation matrix
    const double x = 0.9, t = 2.4;
    const auto rot = transfer(identity_h(), t, cdouble(x, 0.0));
    CHECK(std::abs(rot.m.a11 - std::cos(x * t)) < 1e-13);
    CHECK(std::abs(rot.m.a12 - std::sin(x * t)) < 1e-13);
    CHECK(std::abs(rot.m.a21 + std::sin(x * t)) < 1e-13);
}

TEST_CASE("transfer: symplectic determinant and nesting") {
    Rng rng(51);
    // real spectral parameter: factors stay bounded, det M = 1 absolutely
    for (int k = 0; k < 40; ++k) {
        const auto h = oracles::random_fc_det1(rng, 8);
        std::uniform_real_distribution<double> ux(-50.0, 50.0);
        const cdouble x(ux(rng), 0.0);
        const auto m = transfer(h, h.ell() + 100.0, x);
        CHECK(std::abs(m.m.det() - 1.0) < 1e-10);
    }
    // complex z: entries grow like e^{Im z xi(t)}, so the symplectic defect
    // is measured against the matrix scale
    for (int k = 0; k < 40; ++k) {
        const auto h = oracles::random_fc_det1(rng, 8);
        std::uniform_real_distribution<double> uz(-5.0, 5.0);
        const cdouble z(uz(rng), std::abs(uz(rng)) + 0.1);
        const double ell = h.ell();
        const auto m2 = transfer(h, ell + 1.0, z);
        const double scale = 1.0 + max_abs_entry(m2.m) * max_abs_entry(m2.m);
        CHECK(std::abs(m2.m.det() - 1.0) < 1e-12 * scale);
        const double t1 = 0.37 * ell;
        const Mat2C left = transfer_between(h, t1, ell + 1.0, z);
        const Mat2C m1 = transfer(h, t1, z).m;
        CHECK(max_abs_entry(left * m1 - m2.m) <
              1e-12 * (1.0 + max_abs_entry(left) * max_abs_entry(m1)));
    }
}

TEST_CASE("transfer of a conjugated Hamiltonian is A^{-1} M A") {
    Rng rng(52);
    for (int k = 0; k < 30; ++k) {
        const auto h = oracles::random_fc_det1(rng, 6);
        const Mat2R a = random_sl2(rng);
        const auto ha = conjugate_sl2(h, a);
        const cdouble z(0.4, 0.8);
        const double t = h.ell();
        const Mat2C m = transfer(h, t, z).m;
        const Mat2C ma = transfer(ha, t, z).m;
        const Mat2R ainv = a.inverse();
        const Mat2C expect = Mat2C(ainv) * m * Mat2C(a);
        CHECK(max_abs_entry(ma - expect) < 1e-10 * (1.0 + max_abs_entry(expect)));
    }
}

TEST_CASE("weyl_constant values") {
    CHECK(std::abs(weyl_constant(Mat2R::identity()) - cdouble(0, 1)) == 0.0);
    CHECK(std::abs(weyl_constant(Mat2R{1, 0, 0, 4}) - cdouble(0, 2)) < 1e-15);
    CHECK(std::abs(weyl_constant(Mat2R{2, 1, 1, 1}) - cdouble(0.5, 0.5)) < 1e-15);
    CHECK_THROWS_AS(weyl_constant(Mat2R{1, 0, 0, 0}), NotPositiveDefinite);
}

TEST_CASE("weyl_fc on the plateau example: m(z) = i/(1 - i z L)") {
    for (double L : {1.0, 2.0, 5.0, 10.0, 100.0}) {
        const auto h = example1_h(L);
        for (const cdouble z : {cdouble(0, 1), cdouble(0.5, 0.7), cdouble(-2, 3)}) {
            const cdouble m = weyl_fc(h, z).m;
            const cdouble ref = cdouble(0, 1) / (1.0 - cdouble(0, 1) * z * L);
            CHECK(std::abs(m - ref) < 1e-13 * (1.0 + std::abs(ref)));
        }
        CHECK(std::abs(weyl_fc(h, {0, 1}).m - cdouble(0, 1) / (1.0 + L)) < 1e-14);
    }
    CHECK(std::abs(weyl_fc(identity_h(), {0.3, 0.9}).m - cdouble(0, 1)) == 0.0);
}

TEST_CASE("weyl value of a constant Hamiltonian matches the limit probe") {
    // m_A from the probe at large t for several constant A
    for (const Mat2R a : {Mat2R{1, 0, 0, 4}, Mat2R{2, 1, 1, 1}, Mat2R{3, -1, -1, 2}}) {
        PiecewiseHamiltonian h;
        h.cells.push_back(Cell::constant(40.0, a));
        h.tail = a;
        const cdouble z(0, 1);
        const auto probe = weyl_limit_probe(h, z, 0.0, false, {35.0, 40.0});
        const cdouble ref = weyl_constant(a);
        REQUIRE(probe.back().value.has_value());
        CHECK(std::abs(*probe.back().value - ref) < 1e-8);
    }
}

TEST_CASE("weyl limit probe: convergence and omega independence") {
    const auto h = identity_h();
    const cdouble z(0, 1);
    std::vector<double> ts{1, 2, 4, 8, 16};
    const auto p0 = weyl_limit_probe(h, z, 0.0, false, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        REQUIRE(p0[i].value.has_value());
        CHECK(std::abs(*p0[i].value - cdouble(0, 1)) <= 10.0 * std::exp(-2.0 * ts[i]));
    }
    // omega = 0 vs omega = 1 vs omega = infinity agree far out
    const auto h1 = example1_h(3);
    const double far = h1.ell() + 40.0;
    const auto a = weyl_limit_probe(h1, z, 0.0, false, {far});
    const auto b = weyl_limit_probe(h1, z, 1.0, false, {far});
    const auto c = weyl_limit_probe(h1, z, 0.0, true, {far});
    CHECK(std::abs(*a[0].value - *b[0].value) < 1e-8);
    CHECK(std::abs(*a[0].value - *c[0].value) < 1e-8);
    CHECK(std::abs(*a[0].value - weyl_fc(h1, z).m) < 1e-8);
}

TEST_CASE("weyl_at_r and the composition identity") {
    const auto h = example1_h(4);
    CHECK(std::abs(weyl_at_r(h, 4.0, {0, 1}) - cdouble(0, 1)) == 0.0);  // m_L = i
    CHECK(std::abs(weyl_at_r(h, 0.0, {0, 1}) - weyl_fc(h, {0, 1}).m) < 1e-15);

    Rng rng(61);
    for (int k = 0; k < 25; ++k) {
        const auto g = oracles::random_fc_det1(rng, 5);
        const auto bounds = g.boundaries();
        const double r = bounds[bounds.size() / 2];
        const cdouble z(0.2, 1.4);
        const cdouble mr = weyl_at_r(g, r, z);
        // composition (10): m = Mob_{M(r)^{-1}}(m_r) rebuilt forward
        const Mat2C m = transfer(g, r, z).m;
        const cdouble rebuilt = (m.a12 + mr * m.a22) / (m.a11 + mr * m.a21);
        CHECK(std::abs(rebuilt - weyl_fc(g, z).m) < 1e-12 * (1.0 + std::abs(rebuilt)));
    }
}

TEST_CASE("herglotz positivity on an upper half-plane grid") {
    Rng rng(71);
    const auto h = oracles::random_fc_det1(rng, 7);
    for (int i = 0; i < 10; ++i)
        for (int j = 1; j <= 10; ++j) {
            const cdouble z(-4.5 + i, 0.15 * j);
            CHECK(weyl_fc(h, z).m.imag() > 0.0);
        }
}

TEST_CASE("dual Weyl relation m_d = -1/m") {
    Rng rng(81);
    for (int k = 0; k < 30; ++k) {
        const auto h = oracles::random_fc_det1(rng, 6);
        const cdouble z(0.6, 0.9);
        const cdouble m = weyl_fc(h, z).m;
        const cdouble md = weyl_fc(dual(h), z).m;
        CHECK(std::abs(md + 1.0 / m) < 1e-10 * (1.0 + std::abs(md)));
    }
}

TEST_CASE("SL(2,R) fractional-linear law for m") {
    Rng rng(82);
    for (int k = 0; k < 30; ++k) {
        const auto h = oracles::random_fc_det1(rng, 6);
        const Mat2R a = random_sl2(rng);
        const cdouble z(0, 1);
        const cdouble m = weyl_fc(h, z).m;
        const cdouble ma = weyl_fc(conjugate_sl2(h, a), z).m;
        const cdouble expect = (a.a22 * m + a.a12) / (a.a21 * m + a.a11);
        CHECK(std::abs(ma - expect) < 1e-10 * (1.0 + std::abs(expect)));
    }
}

TEST_CASE("spectral density closed forms") {
    // plateau example: w(x) = 1/(1 + x^2 L^2)
    const double L = 5;
    const auto h = example1_h(L);
    std::vector<double> xs{-3.0, -0.5, 0.0, 0.25, 1.0, 7.0};
    const auto w = spectral_density(h, xs);
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(w[i] == doctest::Approx(1.0 / (1.0 + xs[i] * xs[i] * L * L)).epsilon(1e-13));

    const auto wi = spectral_density(identity_h(), xs);
    for (double v : wi) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("entropy closed form") {
    for (double L : {1.0, 2.0, 5.0, 10.0, 100.0})
        CHECK(entropy_closed_form(example1_h(L)) ==
              doctest::Approx(std::log1p(L)).epsilon(1e-12));
    CHECK(std::abs(entropy_closed_form(identity_h())) < 1e-14);
}

TEST_CASE("entropy at r and additivity (Lemma 2.3a)") {
    Rng rng(91);
    for (int k = 0; k < 25; ++k) {
        const auto h = oracles::random_fc_det1(rng, 6);
        const double K0 = entropy_closed_form(h);
        CHECK(K0 >= -1e-10);
        for (double r : h.boundaries()) {
            const double lhs = K0;
            const double rhs = entropy_closed_form(bernstein_szego(h, r)) + entropy_at_r(h, r);
            CHECK(std::abs(lhs - rhs) < 1e-8 * (1.0 + std::abs(lhs)));
        }
        CHECK(entropy_at_r(h, h.ell()) == 0.0);
        CHECK(entropy_at_r(h, h.ell() + 3.0) == 0.0);
    }
}

TEST_CASE("entropy derivative identities (Lemma 2.3 c-e) under step halving") {
    // det-1 smooth Hamiltonian: the cosh/sinh family with v = 0.4
    PiecewiseHamiltonian h;
    h.cells.push_back(Cell::dirac(3.0, Mat2R::identity(), Mat2R{0.4, 0, 0, -0.4}));
    const Cell& c = h.cells[0];
    h.tail = c.h_at(3.0);

    auto ir = [&](double r) { return weyl_at_r(h, r, cdouble(0, 1)); };
    const double r0 = 1.3;
    const Mat2R hm = h.h_at(r0);
    const double h1 = hm.a11, hoff = hm.a12;

    auto residuals = [&](double step) {
        const cdouble mc = ir(r0), mp = ir(r0 + step), mm = ir(r0 - step);
        const double I = mc.imag(), R = mc.real();
        const double dI = (mp.imag() - mm.imag()) / (2 * step);
        const double dR = (mp.real() - mm.real()) / (2 * step);
        const double dK = (entropy_at_r(h, r0 + step) - entropy_at_r(h, r0 - step)) / (2 * step);
        const double ih1 = I * h1;
        const double rc = dR / I - (2 * R * h1 - 2 * hoff);                    // (e)
        const double ri = dI / I - ((ih1 - 1 / ih1) - (dR / I) * (dR / I) / (4 * ih1));  // (d)
        const double rk = dK - ((2 - ih1 - 1 / ih1) - (dR / I) * (dR / I) / (4 * ih1));  // (c)
        return std::array<double, 3>{std::abs(rc), std::abs(ri), std::abs(rk)};
    };
    const auto e1 = residuals(2e-3);
    const auto e2 = residuals(1e-3);
    for (int i = 0; i < 3; ++i) {
        CHECK(e2[i] < e1[i]);
        CHECK(e1[i] / e2[i] >= 3.5);  // O(h^2) central differences
    }
}

TEST_CASE("preconditions surface as errors") {
    CHECK_THROWS_AS(weyl_fc(example1_h(2), cdouble(1.0, -0.5)), Error);
    PiecewiseHamiltonian trivial;
    trivial.tail = Mat2R{1, 0, 0, 0};
    CHECK_THROWS_AS(weyl_fc(trivial, cdouble(0, 1)), InvalidHamiltonian);
    CHECK_THROWS_AS(entropy_closed_form(trivial), InvalidHamiltonian);
}
