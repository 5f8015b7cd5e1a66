"""CROC analysis of MIMO reporting channels for distributed detection."""

from ._core import (
    ConfigError,
    CrocCurve,
    LocalSensor,
    Mgf,
    NoFeasibleThreshold,
    PoleError,
    QuadratureDivergence,
    Scenario,
    UnsupportedClosedForm,
    analytic_croc,
    bayes_threshold,
    default_threshold_grid,
    estimate_croc,
    make_scenario,
    neyman_pearson_threshold,
    observation_bound,
    run_sweep,
)

__all__ = [
    "ConfigError",
    "CrocCurve",
    "LocalSensor",
    "Mgf",
    "NoFeasibleThreshold",
    "PoleError",
    "QuadratureDivergence",
    "Scenario",
    "UnsupportedClosedForm",
    "analytic_croc",
    "bayes_threshold",
    "default_threshold_grid",
    "estimate_croc",
    "make_scenario",
    "neyman_pearson_threshold",
    "observation_bound",
    "run_sweep",
]
