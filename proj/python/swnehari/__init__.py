"""Positive solutions of a doubly weighted Stein-Weiss problem on Nehari manifolds.

Fields are numpy arrays of shape (M, M, M) on the cell-centered grid of a
GridSpec, indexed [x, y, z].
"""

from ._core import (
    ConfigError,
    GridSpec,
    HypothesisError,
    ModelParams,
    Problem,
    SolverError,
    estimate_lambda_lower,
    estimate_lambda_star,
    fibering_constants,
    load_config,
    solve,
    trichotomy,
    validate,
)

__all__ = [
    "ConfigError",
    "GridSpec",
    "HypothesisError",
    "ModelParams",
    "Problem",
    "SolverError",
    "estimate_lambda_lower",
    "estimate_lambda_star",
    "fibering_constants",
    "load_config",
    "solve",
    "trichotomy",
    "validate",
]
