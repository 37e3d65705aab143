#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Basket Bounds Errors
Named exceptions raised by the market, relaxation, solver, hedging and oracle components

Purpose: Give every failure mode of the bound pipeline a name callers can catch
"""

from typing import Any, Dict, Optional


class BasketBoundsError(Exception):
    """Base class for all basket bound errors"""


class MarketValidationError(BasketBoundsError):
    """Market data violates a structural invariant"""

    def __init__(self, message: str, violations: Optional[list] = None):
        super().__init__(message)
        self.violations = violations or []


class FileFormatError(BasketBoundsError):
    """Input file could not be parsed"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column


class MarketFileError(FileFormatError):
    """Market or certificate file could not be parsed"""


class StandardFormError(FileFormatError):
    """Standard-form text export could not be parsed"""


class NegativeResult(BasketBoundsError):
    """Quote conversion produced a negative straddle price (quote-level arbitrage)"""


class UnboundedSupport(BasketBoundsError):
    """Operation needs a compact support box"""


class DimensionMismatch(BasketBoundsError):
    """Vector length does not match the market dimension"""


class IndexTooSmall(BasketBoundsError):
    """Moment index degree cap is below what a matrix references"""


class InfeasibleDegree(BasketBoundsError):
    """Relaxation order below 1"""


class NumericalBreakdown(BasketBoundsError):
    """Newton system stayed singular after regularization"""


class SolverFailure(BasketBoundsError):
    """Solver did not return a usable solution"""

    def __init__(self, message: str, residuals: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.residuals = residuals or {}


class NotOptimal(BasketBoundsError):
    """Certificate extraction needs an optimal solution"""


class CertificateError(BasketBoundsError):
    """Dual solution cannot be turned into a sum-of-squares certificate"""


class GridInfeasible(BasketBoundsError):
    """Observed prices cannot be attained by any grid-supported measure"""

    def __init__(self, message: str, grid_size: int = 0):
        super().__init__(f"{message}; refine the grid before concluding arbitrage")
        self.grid_size = grid_size


class OracleLimitExceeded(BasketBoundsError):
    """Oracle only runs at desk scale (n <= 3, grids <= 1e5 points)"""
