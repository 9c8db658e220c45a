"""Smoke tests for the python bindings."""

import math

import pytest

import ulam_lab as ul


def test_algebra_basics():
    alg = ul.TernaryAlgebra(1, "derived")
    two = ul.AlgebraElement.scalar(2)
    three = ul.AlgebraElement.scalar(3)
    four = ul.AlgebraElement.scalar(4)
    prod = alg.product(two, three, four)
    assert prod.entries[0] == pytest.approx(24.0)
    assert alg.norm(ul.AlgebraElement.scalar(3 + 4j)) == pytest.approx(5.0)
    assert alg.power(two, 4).entries[0] == pytest.approx(16.0)


def test_star_rule_rejects_powers():
    star = ul.TernaryAlgebra(2, "star")
    with pytest.raises(ul.StructuralError):
        star.power(ul.AlgebraElement.identity(2), 2)


def test_axiom_checks():
    alg = ul.TernaryAlgebra(2, "derived")
    report = ul.check_algebra_axioms(alg, samples=50, seed=7)
    assert report.worst_relative() <= 1e-12
    module = ul.check_module_axioms(alg, samples=50, seed=7)
    assert module.worst_relative() <= 1e-12
    assert any(c.name.startswith("MTM3") for c in module.checks)


def test_coefficients():
    assert [ul.coeff_c(m) for m in (1, 2, 3, 4)] == [(0, 1), (0, 1), (0, 1), (-1, 1)]


def test_monomial_solves_unified_equation():
    f = ul.MapSpec.monomial(ul.AlgebraElement.scalar(1 + 1j), 3)
    x = ul.AlgebraElement.scalar(0.7 + 0.2j)
    y = ul.AlgebraElement.scalar(0.1 - 0.4j)
    r = ul.delta_m(f, x, y, a=2, m=3)
    assert r.relative() <= 1e-12


def test_scaled_evaluation_decay():
    f = ul.MapSpec.monomial(ul.AlgebraElement.scalar(2), 3).with_radial(
        epsilon=1e-3, exponent=5.0, direction="fixed",
        unit=ul.AlgebraElement.scalar(1))
    v = ul.evaluate_scaled(f, ul.AlgebraElement.scalar(1), a=2, m=3, n=10)
    assert v.entries[0].real == pytest.approx(2.0 + 1e-3 * 2.0 ** -20, rel=1e-13)


def test_sigma_hom_residual_commutative():
    f = ul.MapSpec.monomial(ul.AlgebraElement.scalar(1), 2)
    alg = ul.TernaryAlgebra(1, "derived")
    sigma = ul.Permutation3([2, 3, 1])
    r = ul.sigma_hom_residual(
        f,
        ul.AlgebraElement.scalar(2),
        ul.AlgebraElement.scalar(3),
        ul.AlgebraElement.scalar(4),
        sigma,
        alg,
    )
    assert r.norm() <= 1e-12 * r.scale
    assert r.scale == pytest.approx(576.0)


def test_run_experiment_from_dict():
    report = ul.run(
        {
            "kind": "derivation_stability",
            "algebra": {"dim": 1, "product": "trivial"},
            "base": {"type": "monomial", "coeff": 2.0, "degree": 4},
            "perturbation": {
                "type": "radial",
                "epsilon": 1e-3,
                "exponent": 6.0,
                "direction": "fixed",
                "seed": 7,
            },
            "m": 4,
            "a": 2,
            "direction": "shrink",
            "phi": {"family": "power_sum", "exponent": 6.0},
            "psi": {"family": "power_product", "exponent": 5.0},
            "depth": 20,
            "grid": {"radius": 1.0, "shells": 8, "directions": 3, "seed": 11},
            "seed": 42,
        }
    )
    assert report["exit_code"] == 0
    assert report["all_passed"] is True
    assert report["certificate"]["L"] == pytest.approx(0.25)
    assert report["residuals"]["delta_extracted_rel"] <= 1e-9
    ratios = [row["ratio"] for row in report["curve"]]
    assert max(ratios) <= 1.0


def test_unknown_config_key_raises():
    with pytest.raises(ul.ConfigError):
        ul.run({"kind": "axioms", "typo": 1})
