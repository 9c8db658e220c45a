#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ulam/funceq.hpp"

using namespace ulam;

namespace {

AlgebraElement s(double re, double im = 0.0) { return AlgebraElement::scalar({re, im}); }

const TernaryAlgebra scalars{1, ProductRule::derived, false};

// Brute-force scalar oracle for the unified equation, written directly from
// the displayed formula with independent arithmetic (std::pow, double c_m).
complexd delta_oracle(const std::function<complexd(complexd)>& f, complexd x, complexd y,
                      int a, int m) {
    double am2 = std::pow(static_cast<double>(a), m - 2);
    double cm = (m - 2) * (1.0 - (m - 2) * (m - 2)) / 6.0;
    complexd ax = static_cast<double>(a) * x;
    return f(ax + y) + f(ax - y) - am2 * (f(x + y) + f(x - y)) -
           2.0 * (static_cast<double>(a) * a - 1.0) * (am2 * f(x) + cm * f(y));
}

MapFn scalar_map(std::function<complexd(complexd)> f) {
    return [f](const AlgebraElement& x) { return AlgebraElement::scalar(f(x.at(0, 0))); };
}

}  // namespace

TEST_CASE("coefficient of f(y) is (0, 0, 0, -1) as exact rationals") {
    const long long expected[4] = {0, 0, 0, -1};
    for (int m = 1; m <= 4; ++m) {
        Rational c = coeff_c(m);
        CHECK(c.den == 1);
        CHECK(c.num == expected[m - 1]);
    }
    CHECK_THROWS_AS(coeff_c(0), ConfigError);
    CHECK_THROWS_AS(coeff_c(5), ConfigError);
}

TEST_CASE("monomials annihilate the unified equation") {
    Rng rng(2024);
    for (int m = 1; m <= 4; ++m) {
        for (int a : {2, 3, -2}) {
            for (complexd c : {complexd{1, 0}, complexd{2, 0}, complexd{1, 1}}) {
                MapSpec f = MapSpec::monomial(AlgebraElement::scalar(c), m);
                for (int i = 0; i < 30; ++i) {
                    AlgebraElement x = scalars.random_element(rng);
                    AlgebraElement y = scalars.random_element(rng);
                    Residual r = delta_m(f, x, y, a, m);
                    CHECK(r.relative() <= 1e-10);
                }
            }
        }
    }
}

TEST_CASE("identity map under the m=2 equation: frozen oracle value") {
    MapFn id = scalar_map([](complexd t) { return t; });
    Residual r = delta_m(id, s(1), s(0), 2, 2);
    CHECK(r.element.at(0, 0).real() == doctest::Approx(-4.0).epsilon(1e-14));
    // matches the brute-force oracle at generic points too
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        complexd x = rng.unit_square(), y = rng.unit_square();
        Residual got = delta_m(id, AlgebraElement::scalar(x), AlgebraElement::scalar(y), 2, 2);
        complexd want = delta_oracle([](complexd t) { return t; }, x, y, 2, 2);
        CHECK(std::abs(got.element.at(0, 0) - want) <= 1e-13 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("everything vanishes at the origin") {
    MapSpec f = MapSpec::monomial(s(3, 1), 2);
    Residual r = delta_m(f, s(0), s(0), 3, 2);
    CHECK(r.norm() == 0.0);
    CHECK(r.scale == 0.0);
}

TEST_CASE("classical residuals") {
    MapFn sq = scalar_map([](complexd t) { return t * t; });
    MapFn cube = scalar_map([](complexd t) { return t * t * t; });

    CHECK(classical_residual(ClassicalEq::quadratic, sq, s(1), s(1)).relative() <= 1e-14);
    CHECK(classical_residual(ClassicalEq::cubic, cube, s(1), s(2)).relative() <= 1e-14);

    // wrong degree: the quartic residual of x^3 matches the brute-force oracle
    Residual got = classical_residual(ClassicalEq::quartic, cube, s(1), s(1));
    auto c3 = [](complexd t) { return t * t * t; };
    complexd want = c3(complexd{3, 0}) + c3(complexd{1, 0}) -
                    4.0 * (c3(complexd{2, 0}) + c3(complexd{0, 0})) - 24.0 * c3(complexd{1, 0}) +
                    6.0 * c3(complexd{1, 0});
    CHECK(got.element.at(0, 0).real() == doctest::Approx(want.real()).epsilon(1e-13));
    CHECK(want != complexd{0.0, 0.0});
}

TEST_CASE("unified equation specializes to the classical cubic and quartic at a = 2") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        std::array<complexd, 4> coeffs;
        for (auto& c : coeffs) c = rng.unit_square();
        auto poly = scalar_map([coeffs](complexd t) {
            complexd acc{0, 0}, p{1, 0};
            for (int k = 0; k < 4; ++k) {
                p *= t;
                acc += coeffs[k] * p;
            }
            return acc;
        });
        for (int i = 0; i < 50; ++i) {
            AlgebraElement x = scalars.random_element(rng), y = scalars.random_element(rng);
            for (int m : {3, 4}) {
                Residual lhs = delta_m(poly, x, y, 2, m);
                Residual rhs = classical_residual(
                    m == 3 ? ClassicalEq::cubic : ClassicalEq::quartic, poly, x, y);
                double scale = std::max(lhs.scale, rhs.scale);
                CHECK((lhs.element - rhs.element).norm() <= 1e-12 * scale);
            }
        }
    }
}

TEST_CASE("delta is linear in the map") {
    Rng rng(7);
    MapFn f = scalar_map([](complexd t) { return t * t; });
    MapFn g = scalar_map([](complexd t) { return complexd{0.5, 0.25} * t * t * t; });
    complexd lambda{1.5, -2.0};
    MapFn combo = scalar_map([lambda](complexd t) {
        return t * t + lambda * complexd{0.5, 0.25} * t * t * t;
    });
    for (int i = 0; i < 50; ++i) {
        AlgebraElement x = scalars.random_element(rng), y = scalars.random_element(rng);
        Residual rf = delta_m(f, x, y, 2, 3), rg = delta_m(g, x, y, 2, 3),
                 rc = delta_m(combo, x, y, 2, 3);
        AlgebraElement expected = rf.element + rg.element * lambda;
        double scale = std::max({rf.norm(), rg.norm(), rc.norm(), 1e-300});
        CHECK((rc.element - expected).norm() <= 1e-12 * scale);
    }
}

TEST_CASE("evenness in y for even-degree equations") {
    Rng rng(13);
    for (int m : {2, 4}) {
        MapSpec f = MapSpec::monomial(s(1, 2), m);
        for (int i = 0; i < 30; ++i) {
            AlgebraElement x = scalars.random_element(rng), y = scalars.random_element(rng);
            Residual plus = delta_m(f, x, y, 3, m);
            Residual minus = delta_m(f, x, -y, 3, m);
            double scale = std::max({plus.scale, minus.scale, 1e-300});
            CHECK((plus.element - minus.element).norm() <= 1e-12 * scale);
        }
    }
}

TEST_CASE("derivation residual: inner derivations telescope (m = 1)") {
    TernaryAlgebra alg{2, ProductRule::derived, false};
    Rng rng(42);
    AlgebraElement c = alg.random_element(rng);
    MapSpec f = MapSpec::inner_derivation(c, ProductRule::derived);
    for (int i = 0; i < 100; ++i) {
        AlgebraElement x = alg.random_element(rng), y = alg.random_element(rng),
                       z = alg.random_element(rng);
        Residual r = derivation_residual(f, x, y, z, 1, alg);
        CHECK(r.relative() <= 1e-12);
    }
}

TEST_CASE("derivation residual: trivial product is exactly zero") {
    TernaryAlgebra alg{1, ProductRule::trivial, false};
    MapSpec f = MapSpec::monomial(s(2, 1), 3);
    Rng rng(8);
    for (int i = 0; i < 20; ++i) {
        AlgebraElement x = alg.random_element(rng), y = alg.random_element(rng),
                       z = alg.random_element(rng);
        CHECK(derivation_residual(f, x, y, z, 3, alg).norm() == 0.0);
    }
}

TEST_CASE("derivation residual: identity map frozen value") {
    MapFn id = scalar_map([](complexd t) { return t; });
    Residual r = derivation_residual(id, s(1), s(1), s(1), 1, scalars);
    CHECK(r.element.at(0, 0).real() == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("sigma-homomorphism residual") {
    Permutation3 identity;
    Permutation3 cycle({2, 3, 1});

    MapFn id = scalar_map([](complexd t) { return t; });
    CHECK(sigma_hom_residual(id, s(2), s(3), s(4), identity, scalars, scalars).norm() == 0.0);

    // f(x) = x^2, cyclic sigma, (2,3,4): f(24) = 576 = [9, 16, 4]
    MapFn sq = scalar_map([](complexd t) { return t * t; });
    Residual r = sigma_hom_residual(sq, s(2), s(3), s(4), cycle, scalars, scalars);
    CHECK(r.norm() <= 1e-12 * r.scale);
    CHECK(r.scale == doctest::Approx(576.0).epsilon(1e-14));

    // perturbed square map: residual of magnitude O(eps), against the oracle
    const double eps = 1e-4;
    auto g = [eps](complexd t) { return t * t + eps * std::pow(std::abs(t), 3.0); };
    MapFn sq_pert = scalar_map(g);
    Rng rng(17);
    for (int i = 0; i < 20; ++i) {
        complexd x1 = rng.unit_square(), x2 = rng.unit_square(), x3 = rng.unit_square();
        Residual got = sigma_hom_residual(sq_pert, AlgebraElement::scalar(x1),
                                          AlgebraElement::scalar(x2),
                                          AlgebraElement::scalar(x3), cycle, scalars, scalars);
        complexd want = g(x1 * x2 * x3) - g(x2) * g(x3) * g(x1);
        CHECK(std::abs(got.element.at(0, 0) - want) <= 1e-12 * std::abs(want) + 1e-15);
        CHECK(got.norm() > 0.0);
        CHECK(got.norm() <= 40.0 * eps);  // crude O(eps) envelope for unit-square inputs
    }
}

TEST_CASE("permutations: construction and enumeration") {
    CHECK(Permutation3::all().size() == 6);
    CHECK_THROWS_AS(Permutation3({1, 1, 3}), ConfigError);
    Permutation3 swap12({2, 1, 3});
    CHECK(swap12.image(1) == 2);
    CHECK(swap12.image(2) == 1);
    CHECK(swap12.image(3) == 3);
}

TEST_CASE("residual_sup over grids") {
    TernaryAlgebra alg{1, ProductRule::derived, false};
    EvalGrid grid = EvalGrid::make(alg, 1.0, 6, 3, 2, 4);
    SupParams params;
    params.a = 2;
    params.m = 3;

    // exact monomial: relative sup at rounding level
    MapSpec exact = MapSpec::monomial(s(1, 1), 3);
    SupResult res = residual_sup(ResidualKind::delta, exact.fn(), grid, params);
    CHECK(res.sup_relative <= 1e-10);

    // zero map: exactly zero
    MapSpec zero = MapSpec::zero_map(1);
    CHECK(residual_sup(ResidualKind::delta, zero.fn(), grid, params).sup == 0.0);

    // perturbed map: Delta_m is linear in f, so the sup equals the sup of
    // Delta_m applied to the perturbation alone
    RadialPerturbation p;
    p.epsilon = 1e-3;
    p.exponent = 5.0;
    p.direction = RadialDirection::fixed;
    p.explicit_unit = s(1);
    MapSpec pert = exact.with_radial(p);
    MapSpec pert_only = MapSpec::zero_map(1).with_radial(p);
    SupResult full = residual_sup(ResidualKind::delta, pert.fn(), grid, params);
    SupResult onlyg = residual_sup(ResidualKind::delta, pert_only.fn(), grid, params);
    CHECK(full.sup == doctest::Approx(onlyg.sup).epsilon(1e-9));

    // the attaining pair is reported
    REQUIRE(full.attaining.size() == 2);
    Residual at = delta_m(pert, full.attaining[0], full.attaining[1], params.a, params.m);
    CHECK(at.norm() == doctest::Approx(full.sup).epsilon(1e-12));
}

TEST_CASE("residual_sup subsampling respects the tuple budget") {
    TernaryAlgebra alg{1, ProductRule::derived, false};
    EvalGrid grid = EvalGrid::make(alg, 1.0, 10, 4, 2, 4);  // 40^3 = 64000 triples
    SupParams params;
    params.a = 2;
    params.m = 1;
    params.algebra = alg;
    params.tuple_budget = 5000;
    params.subsample_seed = 3;
    MapSpec f = MapSpec::monomial(s(1), 1);
    SupResult res = residual_sup(ResidualKind::derivation, f.fn(), grid, params);
    CHECK(res.tuples <= 7000);  // keep-probability sampling stays near the budget
    CHECK(res.tuples >= 3000);
}
