"""Utility maximization under bid/ask spreads: primal, dual, shadow prices and grid checks.

Models and reports are JSON. The functions here accept a dict or a JSON string
and return dicts.
"""

import json

from . import _core
from ._core import BudgetExceeded, ConfigurationError, DomainError, ModelError, conjugate

__all__ = [
    "BudgetExceeded",
    "ConfigurationError",
    "DomainError",
    "ModelError",
    "build_example",
    "conjugate",
    "dual",
    "minimax",
    "saddle",
    "shadow",
    "solve",
    "verify_all",
]


def _text(model):
    return model if isinstance(model, str) else json.dumps(model)


def solve(model):
    return json.loads(_core.solve(_text(model)))


def dual(model):
    return json.loads(_core.dual(_text(model)))


def shadow(model, candidate="dual", tol_gap=1e-6):
    return json.loads(_core.shadow(_text(model), candidate, tol_gap))


def minimax(model, s_points=5, gamma_lo=-2.0, gamma_hi=2.0, gamma_step=0.02, budget=1e7):
    return json.loads(_core.minimax(_text(model), s_points, gamma_lo, gamma_hi, gamma_step, budget))


def saddle(model, gamma_points=200, s_points=200):
    return json.loads(_core.saddle(_text(model), gamma_points, s_points))


def build_example(name, n=8, K=6, N=10, quad=16):
    return json.loads(_core.build_example(name, n, K, N, quad))


def verify_all(seed=20240611):
    return _core.verify_all(seed)
