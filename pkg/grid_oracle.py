#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Grid Oracle
Ground truth at desk scale: the bound problem restricted to measures supported on a grid,
discrete-measure pricing and a generator of arbitrage-free test markets

Purpose: Cross-check the SDP bounds from the inside (grid LP) and supply consistent markets
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from bound_errors import DimensionMismatch, GridInfeasible, OracleLimitExceeded, UnboundedSupport
from bound_settings import SolverSettings, load_solver_settings, status
from market_spec import BasketDef, MarketSpec, SupportKind, beta_bound
from payoff_semigroup import MomentIndex, PayoffAlgebra

MAX_ORACLE_ASSETS = 3
MAX_GRID_POINTS = 100_000
WEIGHT_FLOOR = 1e-9


@dataclass
class DiscreteMeasure:
    """Atoms (rows of points) with nonnegative weights summing to one"""
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float)
        if self.points.shape[0] != self.weights.shape[0]:
            raise DimensionMismatch("one weight per atom required")

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def expectation(self, values: np.ndarray) -> np.ndarray:
        return self.weights @ values

    def atoms(self):
        return list(zip(self.points.tolist(), self.weights.tolist()))


@dataclass(frozen=True)
class GridSpec:
    points_per_axis: int = 201
    include_kinks: bool = True
    beta_override: Optional[float] = None


@dataclass
class OracleResult:
    """Grid LP bounds with the extremal grid measures"""
    lower: float
    upper: float
    grid_size: int
    eps_grid: float
    backend: str
    lower_measure: Optional[DiscreteMeasure] = None
    upper_measure: Optional[DiscreteMeasure] = None
    status: str = "Optimal"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "min": self.lower,
            "max": self.upper,
            "grid_size": self.grid_size,
            "eps_grid": self.eps_grid,
            "status": self.status,
            "backend": self.backend,
            "min_support": _support_list(self.lower_measure),
            "max_support": _support_list(self.upper_measure),
        }


def _support_list(measure: Optional[DiscreteMeasure]):
    if measure is None:
        return []
    return [{"x": x, "weight": w} for x, w in measure.atoms()]


def price(measure: DiscreteMeasure, basket: BasketDef) -> float:
    """E|w'x - K| under the measure"""
    if measure.n != len(basket.weights):
        raise DimensionMismatch(f"measure lives in R^{measure.n}, basket has {len(basket.weights)} weights")
    return float(measure.expectation(basket.payoff(measure.points)))


def jensen_floor(market: MarketSpec) -> float:
    """|w_0'p - K_0|: no measure with the given forwards prices the target straddle lower"""
    return abs(market.target.forward_value(market.forwards))


def measure_moments(measure: DiscreteMeasure, index: MomentIndex, algebra: PayoffAlgebra) -> np.ndarray:
    """Moment vector y of the measure in the index order"""
    return measure.expectation(algebra.monomial_values(index.monomials, measure.points))


def grid_points(market: MarketSpec, grid: GridSpec) -> Tuple[np.ndarray, float]:
    """Grid inside the support region, and the largest target payoff move from snapping to it"""
    if not market.is_compact:
        raise UnboundedSupport("grid oracle needs a support box")
    if market.n > MAX_ORACLE_ASSETS:
        raise OracleLimitExceeded(f"oracle runs for n <= {MAX_ORACLE_ASSETS}, market has {market.n} assets")
    if grid.points_per_axis < 2:
        raise OracleLimitExceeded("points_per_axis must be >= 2")
    if grid.points_per_axis ** market.n > MAX_GRID_POINTS:
        raise OracleLimitExceeded(
            f"{grid.points_per_axis}^{market.n} grid points exceed the limit of {MAX_GRID_POINTS}"
        )
    box = market.box
    axes = [np.linspace(0.0, b, grid.points_per_axis) for b in box]
    if market.n == 1 and grid.include_kinks:
        extra = [market.forwards[0]]
        for basket in market.baskets:
            w = basket.weights[0]
            if w != 0.0 and 0.0 < basket.strike / w < box[0]:
                extra.append(basket.strike / w)
        axes[0] = np.unique(np.concatenate([axes[0], extra]))
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.column_stack([m.ravel() for m in mesh])

    beta = grid.beta_override if grid.beta_override is not None else beta_bound(market)
    X = X[market.payoffs(X).sum(axis=1) <= beta + 1e-12]
    spacing = box / (grid.points_per_axis - 1)
    eps_grid = float(np.abs(market.target.w) @ spacing / 2.0)
    return X, eps_grid


def _lp_form(market: MarketSpec, X: np.ndarray, upper: bool):
    """Hedging LP in (forward, straddle positions, cash, one); the row duals are the grid weights"""
    from sdp_solver import StandardForm

    payoffs = market.payoffs(X)
    target = payoffs[:, market.n]
    tradables = np.column_stack([payoffs[:, :market.n], payoffs[:, market.n + 1:], np.ones(X.shape[0])])
    prices = np.concatenate([market.p, np.asarray(market.straddle_prices, dtype=float), [1.0]])
    v = tradables.shape[1] + 1
    E = np.zeros((1, v))
    E[0, -1] = 1.0
    if upper:
        c = np.concatenate([prices, [0.0]])
        rows = np.column_stack([tradables, -target])
    else:
        c = np.concatenate([-prices, [0.0]])
        rows = np.column_stack([-tradables, target])
    return StandardForm(c=c, E=E, f=np.array([1.0]), blocks=[], lp_rows=rows,
                        equality_names=["one"], lp_names=[f"grid {i}" for i in range(X.shape[0])])


def lp_bounds(market: MarketSpec, grid: Optional[GridSpec] = None, backend: str = "highs",
              settings: Optional[SolverSettings] = None) -> OracleResult:
    """min and max of the target straddle price over grid-supported measures matching all prices"""
    from sdp_solver import ConicStatus, get_backend

    grid = grid or GridSpec()
    settings = settings or load_solver_settings()
    X, eps_grid = grid_points(market, grid)
    solver = get_backend(backend)
    status(f"🔄 Grid oracle: {X.shape[0]} points, backend {solver.name}")

    values, measures = {}, {}
    for upper in (False, True):
        solution = solver.solve(_lp_form(market, X, upper), settings)
        if solution.status not in (ConicStatus.OPTIMAL, ConicStatus.INACCURATE):
            raise GridInfeasible(
                f"observed prices are not attainable by a measure on {X.shape[0]} grid points "
                f"({solution.status.value})", X.shape[0]
            )
        value = -solution.primal_objective if not upper else solution.primal_objective
        weights = np.clip(solution.lp_dual, 0.0, None)
        keep = weights > WEIGHT_FLOOR
        total = weights[keep].sum()
        measures[upper] = DiscreteMeasure(X[keep], weights[keep] / total) if total > 0 else None
        values[upper] = float(value)

    result = OracleResult(values[False], values[True], int(X.shape[0]), eps_grid, solver.name,
                          measures[False], measures[True])
    status(f"📊 Grid bounds [{result.lower:.10g}, {result.upper:.10g}] (eps_grid {eps_grid:.2e})")
    return result


def random_consistent_market(seed: int, n: int, m: int, box: Optional[Sequence[float]] = None,
                             atoms: Optional[int] = None) -> Tuple[MarketSpec, DiscreteMeasure]:
    """Market priced under a random discrete measure in the box, returned with that measure"""
    rng = np.random.default_rng(seed)
    bounds = np.asarray(box, dtype=float) if box is not None else rng.uniform(1.5, 3.0, size=n)
    count = atoms or n + m + 2
    points = rng.uniform(0.0, 1.0, size=(count, n)) * bounds
    weights = rng.dirichlet(np.ones(count))
    measure = DiscreteMeasure(points, weights)
    forwards = tuple(float(v) for v in weights @ points)

    baskets = []
    for _ in range(m + 1):
        w = rng.uniform(0.2, 1.0, size=n)
        if n > 1 and rng.uniform() < 0.3:
            w[rng.integers(n)] *= -1.0
        values = points @ w
        if values.max() <= 0.0:
            # strikes are clipped at zero, so keep some atoms above the strike
            w, values = -w, -values
        strike = float(max(0.0, rng.uniform(values.min(), values.max())))
        baskets.append(BasketDef(tuple(float(v) for v in np.round(w, 6)), round(strike, 6)))

    prices = tuple(price(measure, basket) for basket in baskets[1:])
    market = MarketSpec(n, forwards, tuple(baskets), prices, SupportKind.COMPACT, tuple(float(b) for b in bounds))
    return market, measure


def main():
    """Grid bounds of the one-asset straddle at the money"""
    market = MarketSpec(1, (1.0,), (BasketDef((1.0,), 1.0),), (), SupportKind.COMPACT, (2.0,))
    result = lp_bounds(market, GridSpec(201))
    print(f"✅ Grid bounds: [{result.lower:.10f}, {result.upper:.10f}] on {result.grid_size} points")


if __name__ == "__main__":
    main()
