"""Active l1 (least absolute deviation) regression by Lewis-weight row sampling."""

import json as _json

from ._activelad import (
    ConvergenceError,
    DataError,
    DimensionError,
    Error,
    InvalidArgument,
    RankDeficientError,
    __version__,
    active_solve,
    draw_sketch,
    expected_loss,
    leverage_scores,
    lewis_weights,
    make_outlier_instance,
    recommended_budget,
    sketch_and_solve_known_y,
    solve_lad,
    verify_fixed_point,
    weighted_median,
)
from ._activelad import run_experiment as _run_experiment


def run_experiment(spec):
    """Run an experiment spec (dict or JSON text) and return the report as a dict."""
    text = spec if isinstance(spec, str) else _json.dumps(spec)
    return _json.loads(_run_experiment(text))


__all__ = [
    "ConvergenceError",
    "DataError",
    "DimensionError",
    "Error",
    "InvalidArgument",
    "RankDeficientError",
    "__version__",
    "active_solve",
    "draw_sketch",
    "expected_loss",
    "leverage_scores",
    "lewis_weights",
    "make_outlier_instance",
    "recommended_budget",
    "run_experiment",
    "sketch_and_solve_known_y",
    "solve_lad",
    "verify_fixed_point",
    "weighted_median",
]
