"""Python interface to the houses optimizer.

Spaces and run configurations are plain dicts with the same layout as the
JSON files the command-line tool reads.
"""

import json

from ._houses import (
    GPModel,
    KernelParams,
    acquisition,
    benchmark,
    cli_main,
    cov_matrix,
    importance,
    kernel,
    kumaraswamy_warp,
    normal_cdf,
    normal_pdf,
)
from . import _houses

__all__ = [
    "GPModel",
    "KernelParams",
    "acquisition",
    "benchmark",
    "cli_main",
    "cov_matrix",
    "importance",
    "kernel",
    "kumaraswamy_warp",
    "normal_cdf",
    "normal_pdf",
    "optimize",
    "unit_cube",
]


def unit_cube(dim):
    """Space of ``dim`` continuous [0, 1] parameters named x1..xD."""
    return {
        "params": [
            {"name": f"x{d + 1}", "kind": "continuous", "lower": 0.0, "upper": 1.0, "scale": "linear"}
            for d in range(dim)
        ]
    }


def optimize(space, objective, *, objective_seed=0, **config):
    """Run one search and return its evaluation records, in order.

    ``objective`` is a builtin name or a callable taking ``{name: value}`` and
    returning the value to minimize; returning None or raising marks the
    evaluation failed. Keyword arguments are run-configuration fields
    (budget, strategy, kernel, acquisition, seed, n0, ucb_w, ...).
    """
    space_json = json.dumps(space)
    config_json = json.dumps(config)
    if isinstance(objective, str):
        raw = _houses._optimize_builtin(space_json, objective, config_json, objective_seed)
    else:
        raw = _houses._optimize_callable(space_json, objective, config_json)
    return json.loads(raw)
