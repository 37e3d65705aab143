#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Basket Bounds Settings
Solver defaults, environment overrides and status output

Purpose: One place for tunable numbers and for the emoji status lines every component prints
"""

import os
import sys
from dataclasses import dataclass, replace

ENV_VERBOSITY = "BASKET_BOUNDS_VERBOSITY"
ENV_TOL = "BASKET_BOUNDS_TOL"
ENV_MAX_ITER = "BASKET_BOUNDS_MAX_ITER"

QUIET = 0
STATUS = 1
TRACE = 2


@dataclass(frozen=True)
class SolverSettings:
    """Interior-point solver parameters"""
    tol: float = 1e-8
    max_iter: int = 100
    regularization: float = 1e-9
    step_fraction: float = 0.95
    infeasibility_tol: float = 1e-7

    def with_overrides(self, **changes) -> "SolverSettings":
        """Copy with the given fields replaced (None values ignored)"""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        print(f"⚠️ Ignoring {name}={raw!r}: not a number", file=sys.stderr)
        return default


def load_solver_settings() -> SolverSettings:
    """Default settings with environment overrides applied"""
    defaults = SolverSettings()
    return defaults.with_overrides(
        tol=_env_float(ENV_TOL, defaults.tol),
        max_iter=int(_env_float(ENV_MAX_ITER, defaults.max_iter)),
    )


_verbosity = None


def get_verbosity() -> int:
    global _verbosity
    if _verbosity is None:
        _verbosity = int(_env_float(ENV_VERBOSITY, STATUS))
    return _verbosity


def set_verbosity(level: int):
    global _verbosity
    _verbosity = int(level)


def status(message: str, level: int = STATUS):
    """Print a status line to stderr when verbosity allows it"""
    if get_verbosity() >= level:
        print(message, file=sys.stderr)
