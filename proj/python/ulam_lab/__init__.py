"""Numerical laboratory for a unified additive/quadratic/cubic/quartic
functional equation on small ternary algebras."""

import json as _json

from ._core import (  # noqa: F401
    AlgebraElement,
    AxiomCheck,
    AxiomReport,
    ConfigError,
    MapSpec,
    Permutation3,
    ProductRule,
    Residual,
    ScaleDirection,
    StructuralError,
    TernaryAlgebra,
    __version__,
    check_algebra_axioms,
    check_module_axioms,
    classical_residual,
    coeff_c,
    delta_m,
    derivation_residual,
    evaluate_scaled,
    run_experiment,
    sigma_hom_residual,
)


def run(config):
    """Run an experiment from a config dict (or JSON string); returns the
    report as a dict."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _json.loads(run_experiment(config))
