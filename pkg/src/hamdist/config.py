"""Numeric tolerances shared by the whole package.

Every check reads the module-level ``TOL`` at call time, so overriding it
through :func:`configure` (or the :func:`tolerances` context manager) takes
effect everywhere.
"""
from __future__ import annotations

import contextlib
import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12
    traceless: float = 1e-12
    unitary: float = 1e-10
    coords: float = 1e-12
    distinct: float = 1e-9
    eigen_cluster: float = 1e-9
    decomposition: float = 1e-8
    prune: float = 1e-12
    plan: float = 1e-8
    # relative gap between |lambda_j| values that counts as well separated
    lambda_separation: float = 1e-2
    # last-resort relative gap before giving up on a functional
    lambda_min_separation: float = 1e-9


TOL = Tolerances()


def configure(**overrides) -> Tolerances:
    """Replace selected tolerances globally and return the new record."""
    global TOL
    TOL = dataclasses.replace(TOL, **overrides)
    return TOL


@contextlib.contextmanager
def tolerances(**overrides):
    global TOL
    saved = TOL
    TOL = dataclasses.replace(TOL, **overrides)
    try:
        yield TOL
    finally:
        TOL = saved
