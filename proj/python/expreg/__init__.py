"""Exponentially regularized elliptic solves on truncated domains."""

import json

from . import _expreg
from ._expreg import (
    band_filter,
    choose_T,
    elliptic_green as _elliptic_green,
    expm_apply as _expm_apply,
    fit_decay,
    moments,
    remove_moments,
    verify,
)

__all__ = [
    "band_filter",
    "choose_T",
    "elliptic_green",
    "expm_apply",
    "fit_decay",
    "moments",
    "remove_moments",
    "run_experiment",
    "solve",
    "verify",
]


def solve(config):
    """Solve a single problem. `config` is the body of a {"solve": ...} config (dict)."""
    if "solve" not in config:
        config = {"solve": config}
    u, info = _expreg.solve_json(json.dumps(config))
    return u, json.loads(info)


def run_experiment(plan, threads=1):
    """Run an experiment plan (dict) and return the report: rows, fits, headline."""
    if "plan" not in plan:
        plan = {"plan": plan}
    return json.loads(_expreg.run_experiment_json(json.dumps(plan), threads))


def expm_apply(g, side, T, coefficient="constant", rel_tol=1e-9):
    """e^{-TA} g with zero Dirichlet walls; `coefficient` is a name or a dict spec."""
    return _expm_apply(g, side, T, json.dumps(coefficient), rel_tol)


def elliptic_green(dim, side, nodes_per_unit, y, coefficient="constant"):
    """Discrete Green's function G(.; y) on the full grid."""
    return _elliptic_green(dim, side, nodes_per_unit, list(y), json.dumps(coefficient))
