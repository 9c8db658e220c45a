#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ulam/control.hpp"

using namespace ulam;

namespace {

AlgebraElement s(double re, double im = 0.0) { return AlgebraElement::scalar({re, im}); }

ControlFunction make_control(ControlFamily fam, double theta, double exponent,
                             double delta = 0.0) {
    ControlFunction c;
    c.family = fam;
    c.theta = theta;
    c.exponent = exponent;
    c.delta = delta;
    return c;
}

}  // namespace

TEST_CASE("control family evaluation") {
    ControlFunction ps = make_control(ControlFamily::power_sum, 1.0, 5.0);
    CHECK(ps.eval(s(1), s(0)) == doctest::Approx(1.0).epsilon(1e-15));

    ControlFunction pp = make_control(ControlFamily::power_product, 2.0, 1.0);
    CHECK(pp.eval(s(1), s(0, 1), s(-1)) == doctest::Approx(2.0).epsilon(1e-15));

    // every family vanishes on all-zero points when delta = 0
    ControlFunction sa = make_control(ControlFamily::single_arg, 3.0, 2.0);
    ControlFunction ps3 = make_control(ControlFamily::power_sum3, 3.0, 2.0);
    CHECK(ps.eval(s(0), s(0)) == 0.0);
    CHECK(sa.eval(s(0), s(0)) == 0.0);
    CHECK(pp.eval(s(0), s(0), s(0)) == 0.0);
    CHECK(ps3.eval(s(0), s(0), s(0)) == 0.0);

    CHECK_THROWS_AS(ps.eval(s(1), s(1), s(1)), StructuralError);
    CHECK_THROWS_AS(pp.eval(s(1), s(1)), StructuralError);
}

TEST_CASE("contraction factors, shrink direction") {
    ControlFunction phi = make_control(ControlFamily::power_sum, 1.0, 5.0);
    ContractionCertificate cert =
        contraction_factor(phi, std::nullopt, 2, 3, ScaleDirection::shrink);
    CHECK(cert.feasible);
    CHECK(cert.L == doctest::Approx(0.25).epsilon(1e-15));

    // boundary r = m is infeasible (L = 1)
    ControlFunction phi_b = make_control(ControlFamily::power_sum, 1.0, 3.0);
    ContractionCertificate bad =
        contraction_factor(phi_b, std::nullopt, 2, 3, ScaleDirection::shrink);
    CHECK_FALSE(bad.feasible);
    CHECK(bad.L == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_FALSE(bad.infeasible_reason.empty());

    // a positive constant term cannot contract under shrink
    ControlFunction cp = make_control(ControlFamily::const_plus_power, 1.0, 5.0, 0.5);
    ContractionCertificate cbad =
        contraction_factor(cp, std::nullopt, 2, 3, ScaleDirection::shrink);
    CHECK_FALSE(cbad.feasible);
    CHECK(cbad.infeasible_reason.find("constant term") != std::string::npos);
}

TEST_CASE("joint feasibility follows the corollary conditions") {
    // power_sum(r) with power_product(p): the closed-form choice L = |a|^{m-r}
    // is valid iff r, p > m and (3p - r)/2 >= m
    const int a = 2;
    for (int m = 1; m <= 4; ++m) {
        for (double r = 0.5; r <= 8.0; r += 0.5) {
            for (double p = 0.5; p <= 8.0; p += 0.5) {
                ControlFunction phi = make_control(ControlFamily::power_sum, 1.0, r);
                ControlFunction psi = make_control(ControlFamily::power_product, 1.0, p);
                ContractionCertificate cert =
                    contraction_factor(phi, psi, a, m, ScaleDirection::shrink);
                bool expected_feasible = r > m && p > m;
                CHECK(cert.feasible == expected_feasible);
                if (cert.feasible) {
                    bool corollary = (3.0 * p - r) / 2.0 >= m - 1e-12;
                    CHECK(cert.closed_form_choice == corollary);
                    if (corollary)
                        CHECK(cert.L == doctest::Approx(std::pow(2.0, m - r)).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("expand-direction factors mirror the shrink ones") {
    ControlFunction phi = make_control(ControlFamily::power_sum, 1.0, 1.0);
    ContractionCertificate cert =
        contraction_factor(phi, std::nullopt, 2, 3, ScaleDirection::expand);
    CHECK(cert.feasible);
    CHECK(cert.L == doctest::Approx(0.25).epsilon(1e-15));  // |a|^{r-m} = 2^{-2}

    // the constant term is harmless under expand
    ControlFunction cp = make_control(ControlFamily::const_plus_power, 1.0, 1.0, 0.7);
    ContractionCertificate cert2 =
        contraction_factor(cp, std::nullopt, 2, 3, ScaleDirection::expand);
    CHECK(cert2.feasible);
    CHECK(cert2.L == doctest::Approx(0.25).epsilon(1e-15));

    // sum-form ternary control: the remark-form condition (p - r)/2 <= m
    // appears as the closed-form-choice flag
    ControlFunction psi_sum = make_control(ControlFamily::power_sum3, 1.0, 5.0);
    ControlFunction phi_r = make_control(ControlFamily::power_sum, 1.0, 1.0);
    ContractionCertificate cert3 =
        contraction_factor(phi_r, psi_sum, 2, 3, ScaleDirection::expand);
    // L_psi = |a|^{s-3m} = 2^{-4} <= L_phi = 2^{-2}; (p-r)/2 = 2 <= 3
    CHECK(cert3.feasible);
    CHECK(cert3.closed_form_choice);
    ControlFunction psi_hot = make_control(ControlFamily::power_sum3, 1.0, 8.5);
    ContractionCertificate cert4 =
        contraction_factor(phi_r, psi_hot, 2, 3, ScaleDirection::expand);
    // (p-r)/2 = 3.75 > 3: feasible but the closed-form choice is not valid
    CHECK(cert4.feasible);
    CHECK_FALSE(cert4.closed_form_choice);
}

TEST_CASE("power_sum3 under shrink needs the exponent above 3m") {
    for (int m : {1, 2}) {
        ControlFunction phi = make_control(ControlFamily::power_sum, 1.0, m + 1.0);
        ControlFunction hot = make_control(ControlFamily::power_sum3, 1.0, 3.0 * m + 1.0);
        ControlFunction cold = make_control(ControlFamily::power_sum3, 1.0, 3.0 * m - 0.5);
        ContractionCertificate ok =
            contraction_factor(phi, hot, 2, m, ScaleDirection::shrink);
        CHECK(ok.feasible);
        CHECK(*ok.L_psi == doctest::Approx(0.5).epsilon(1e-12));  // 2^{3m-s} = 2^-1
        ContractionCertificate bad =
            contraction_factor(phi, cold, 2, m, ScaleDirection::shrink);
        CHECK_FALSE(bad.feasible);
    }
}

TEST_CASE("measured contraction factors confirm the analytic ones") {
    Rng pick(31);
    for (auto fam : {ControlFamily::power_sum, ControlFamily::single_arg,
                     ControlFamily::power_product, ControlFamily::power_sum3}) {
        for (auto dir : {ScaleDirection::shrink, ScaleDirection::expand}) {
            for (int trial = 0; trial < 10; ++trial) {
                int m = 1 + static_cast<int>(pick.uniform() * 3.999);
                int a = pick.uniform() < 0.5 ? 2 : 3;
                double e = 0.25 + 7.5 * pick.uniform();
                ControlFunction c = make_control(fam, 0.5 + pick.uniform(), e);
                double analytic = family_contraction_factor(c, a, m, dir);
                double measured = measure_contraction_factor(c, a, m, dir, 400, 99);
                // a sampled sup can only fall below the analytic value
                CHECK(measured <= analytic * (1.0 + 1e-12));
                CHECK(measured >= analytic * (1.0 - 1e-9));
            }
        }
    }
    // the constant term's shrink infeasibility is visible numerically too
    ControlFunction cp = make_control(ControlFamily::const_plus_power, 1.0, 2.0, 0.5);
    double measured = measure_contraction_factor(cp, 2, 3, ScaleDirection::shrink, 400, 99);
    CHECK(measured > 1.0);
}

TEST_CASE("telescoping: |a|^{mn} phi(x/a^n, y/a^n) <= L^n phi(x, y)") {
    Rng rng(12);
    TernaryAlgebra alg{1, ProductRule::derived, false};
    for (double r : {4.0, 5.5, 6.0}) {
        const int a = 2, m = 3;
        ControlFunction phi = make_control(ControlFamily::power_sum, 0.7, r);
        double L = family_contraction_factor(phi, a, m, ScaleDirection::shrink);
        REQUIRE(L < 1.0);
        for (int i = 0; i < 10; ++i) {
            AlgebraElement x = alg.random_element(rng), y = alg.random_element(rng);
            double base = phi.eval(x, y);
            for (int n = 1; n <= 20; ++n) {
                complexd sc{1.0 / ipow(2.0, n), 0.0};
                double lhs = ipow(2.0, m * n) * phi.eval(x * sc, y * sc);
                CHECK(lhs <= std::pow(L, n) * base * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("bound value: frozen example and closed-form agreement") {
    ControlFunction phi = make_control(ControlFamily::power_sum, 1.0, 5.0);
    double b = bound_value(phi, 0.25, 2, 3, s(1), ScaleDirection::shrink);
    CHECK(b == doctest::Approx(1.0 / 48.0).epsilon(1e-14));
    CHECK(closed_form_bound_at_radius(phi, 2, 3, 1.0, ScaleDirection::shrink) ==
          doctest::Approx(1.0 / 48.0).epsilon(1e-14));

    CHECK(bound_value(phi, 0.25, 2, 3, s(0), ScaleDirection::shrink) == 0.0);
    CHECK_THROWS_AS(bound_value(phi, 1.0, 2, 3, s(1), ScaleDirection::shrink), ConfigError);
}

TEST_CASE("the two bound routes agree across parameters") {
    Rng rng(77);
    for (int i = 0; i < 300; ++i) {
        double theta = 0.1 + 3.0 * rng.uniform();
        int m = 1 + static_cast<int>(rng.uniform() * 3.999);
        int a = rng.uniform() < 0.5 ? 2 : 3;
        double radius = 0.01 + 2.0 * rng.uniform();
        {
            // shrink: r > m
            double r = m + 0.25 + 3.0 * rng.uniform();
            ControlFunction phi = make_control(ControlFamily::power_sum, theta, r);
            double L = std::pow(static_cast<double>(a), m - r);
            double via_L = bound_value_at_radius(phi, L, a, m, radius, ScaleDirection::shrink);
            double closed =
                closed_form_bound_at_radius(phi, a, m, radius, ScaleDirection::shrink);
            CHECK(std::abs(via_L - closed) <= 1e-12 * std::max(via_L, closed));
        }
        {
            // expand: r < m, with a constant term
            double r = std::max(0.05, m - 0.25 - (m - 0.3) * rng.uniform());
            double delta = rng.uniform();
            ControlFunction phi = make_control(ControlFamily::const_plus_power, theta, r, delta);
            double L = std::pow(static_cast<double>(a), r - m);
            double via_L = bound_value_at_radius(phi, L, a, m, radius, ScaleDirection::expand);
            double closed =
                closed_form_bound_at_radius(phi, a, m, radius, ScaleDirection::expand);
            CHECK(std::abs(via_L - closed) <= 1e-12 * std::max(via_L, closed));
        }
    }
}

TEST_CASE("bound value is monotone in L and radius") {
    ControlFunction phi = make_control(ControlFamily::power_sum, 1.3, 5.0);
    double prev = 0.0;
    for (double L : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        double b = bound_value_at_radius(phi, L, 2, 3, 1.0, ScaleDirection::shrink);
        CHECK(b > prev);
        prev = b;
    }
    prev = 0.0;
    for (double radius : {0.1, 0.5, 1.0, 2.0}) {
        double b = bound_value_at_radius(phi, 0.25, 2, 3, radius, ScaleDirection::shrink);
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("fit_theta") {
    TernaryAlgebra alg{1, ProductRule::derived, false};
    EvalGrid grid = EvalGrid::make(alg, 1.0, 8, 4, 2, 6);
    ControlFunction shape = make_control(ControlFamily::power_sum, 0.0, 6.0);
    const int a = 2, m = 4;

    // exact monomial: theta at rounding level
    MapSpec exact = MapSpec::monomial(s(2), 4);
    ThetaFit fit = fit_theta(exact, shape, grid, a, m);
    CHECK(fit.feasible);
    CHECK(fit.theta <= 1e-10);

    // zero map: exactly zero
    CHECK(fit_theta(MapSpec::zero_map(1), shape, grid, a, m).theta == 0.0);

    // perturbed map: theta is O(eps), against the direct perturbation oracle
    RadialPerturbation p;
    p.epsilon = 1e-3;
    p.exponent = 6.0;
    p.direction = RadialDirection::fixed;
    p.explicit_unit = s(1);
    MapSpec pert = exact.with_radial(p);
    ThetaFit fit_p = fit_theta(pert, shape, grid, a, m);
    CHECK(fit_p.feasible);
    MapSpec pert_only = MapSpec::zero_map(1).with_radial(p);
    ThetaFit fit_g = fit_theta(pert_only, shape, grid, a, m);
    CHECK(fit_p.theta == doctest::Approx(fit_g.theta).epsilon(1e-6));
    // the y = 0 pairs alone force theta >= 2 eps (|a|^r - |a|^m)
    CHECK(fit_p.theta >= 2.0 * 1e-3 * (64.0 - 16.0) * (1.0 - 1e-9));
    CHECK(fit_p.theta <= 1.0);  // and stays O(eps)
}

TEST_CASE("fit_theta detects shapes that cannot majorize") {
    TernaryAlgebra alg{1, ProductRule::derived, false};
    EvalGrid grid = EvalGrid::make(alg, 1.0, 6, 3, 2, 6);
    // single_arg vanishes on every (x, 0) pair, but a perturbed map has a
    // genuinely nonzero residual there
    ControlFunction shape = make_control(ControlFamily::single_arg, 0.0, 6.0);
    RadialPerturbation p;
    p.epsilon = 1e-3;
    p.exponent = 6.0;
    p.direction = RadialDirection::fixed;
    p.explicit_unit = s(1);
    MapSpec pert = MapSpec::monomial(s(2), 4).with_radial(p);
    ThetaFit fit = fit_theta(pert, shape, grid, 2, 4);
    CHECK_FALSE(fit.feasible);
    CHECK_FALSE(fit.note.empty());

    // while the exact base is fine (0/0 everywhere on the x-axis)
    ThetaFit fit_exact = fit_theta(MapSpec::monomial(s(2), 4), shape, grid, 2, 4);
    CHECK(fit_exact.feasible);
}

TEST_CASE("fit_theta is scale covariant") {
    TernaryAlgebra alg{1, ProductRule::derived, false};
    EvalGrid grid = EvalGrid::make(alg, 1.0, 6, 3, 2, 6);
    ControlFunction shape = make_control(ControlFamily::power_sum, 0.0, 5.0);
    RadialPerturbation p;
    p.epsilon = 1e-3;
    p.exponent = 5.0;
    p.direction = RadialDirection::fixed;
    p.explicit_unit = s(1);
    const double lam = 3.5;
    MapSpec f = MapSpec::monomial(s(1), 3).with_radial(p);
    RadialPerturbation ps = p;
    ps.epsilon = lam * p.epsilon;
    MapSpec fs = MapSpec::monomial(s(lam), 3).with_radial(ps);  // lambda * f
    ThetaFit a_fit = fit_theta(f, shape, grid, 2, 3);
    ThetaFit b_fit = fit_theta(fs, shape, grid, 2, 3);
    CHECK(b_fit.theta == doctest::Approx(lam * a_fit.theta).epsilon(1e-12));
}

TEST_CASE("ternary fit against measured derivation residuals") {
    TernaryAlgebra alg{1, ProductRule::trivial, false};
    EvalGrid grid = EvalGrid::make(alg, 1.0, 5, 3, 2, 6);
    SupParams sp;
    sp.a = 2;
    sp.m = 4;
    sp.algebra = alg;
    ControlFunction shape = make_control(ControlFamily::power_product, 0.0, 5.0);
    // trivial product: all bracket residuals are exactly zero
    MapSpec f = MapSpec::monomial(s(2), 4);
    ThetaFit fit = fit_theta_ternary(f.fn(), shape, grid, sp, ResidualKind::derivation);
    CHECK(fit.feasible);
    CHECK(fit.theta == 0.0);
}
