#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Relaxation Builder
Order-N moment relaxations of the basket bound problem, compact and unbounded hierarchies

Purpose: Assemble conic problems, solve them for lower and upper bounds, and sweep relaxation orders
"""

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from bound_errors import InfeasibleDegree, UnboundedSupport
from bound_settings import SolverSettings, TRACE, load_solver_settings, status
from market_spec import MarketSpec, beta_bound, to_call, to_put
from moment_matrices import LinearForm, SymbolicMatrix, localizing_matrix, moment_matrix
from payoff_semigroup import HierarchyMode, MomentIndex, PayoffAlgebra, PolyElement


class Side(Enum):
    LOWER = "lower"
    UPPER = "upper"

    @property
    def sign(self) -> float:
        return 1.0 if self == Side.LOWER else -1.0


class LocalizerSet(Enum):
    """MINIMAL: coordinates x_i only; FULL: every payoff generator"""
    MINIMAL = "minimal"
    FULL = "full"

    @classmethod
    def _missing_(cls, value):
        return cls.MINIMAL if value == "paper" else None

    @classmethod
    def choices(cls) -> List[str]:
        return [s.value for s in cls] + ["paper"]


class SolveStatus(Enum):
    OPTIMAL = "Optimal"
    PRIMAL_INFEASIBLE = "PrimalInfeasible"
    DUAL_INFEASIBLE = "DualInfeasible"
    INACCURATE = "Inaccurate"


@dataclass(frozen=True)
class RelaxationSpec:
    """One relaxation to build"""
    order: int
    mode: HierarchyMode = HierarchyMode.COMPACT
    side: Side = Side.LOWER
    reduce: bool = True
    localizer_set: LocalizerSet = LocalizerSet.FULL
    parity_localizers: bool = True
    ball_localizer: bool = True
    beta_override: Optional[float] = None


@dataclass(frozen=True)
class EqualityRow:
    name: str
    form: LinearForm
    rhs: float


@dataclass(eq=False)
class ConicProblem:
    """min objective(y) s.t. equalities and PSD blocks; y indexed by a MomentIndex"""
    num_vars: int
    objective: LinearForm
    equalities: List[EqualityRow]
    psd_blocks: List[SymbolicMatrix]
    index: MomentIndex
    algebra: PayoffAlgebra
    spec: RelaxationSpec
    beta: Optional[float] = None
    target_position: int = 1

    @property
    def market(self) -> MarketSpec:
        return self.algebra.market

    def block_names(self) -> List[str]:
        return [block.name for block in self.psd_blocks]

    def summary(self) -> Dict[str, Any]:
        return {
            "mode": self.spec.mode.value,
            "side": self.spec.side.value,
            "order": self.spec.order,
            "variables": self.num_vars,
            "equalities": len(self.equalities),
            "blocks": [f"{b.name} ({b.dim}x{b.dim})" for b in self.psd_blocks],
            "beta": self.beta,
        }


@dataclass
class BoundResult:
    """Outcome of one solved relaxation"""
    side: Side
    order: int
    mode: HierarchyMode
    status: SolveStatus
    value: Optional[float]
    y: Optional[np.ndarray] = None
    dual: Any = None
    residuals: Dict[str, float] = field(default_factory=dict)
    call_bound: Optional[float] = None
    put_bound: Optional[float] = None
    iterations: int = 0
    elapsed: float = 0.0

    @property
    def arbitrage_detected(self) -> bool:
        return self.status == SolveStatus.PRIMAL_INFEASIBLE

    def to_dict(self) -> Dict[str, Any]:
        return {
            "side": self.side.value,
            "order": self.order,
            "mode": self.mode.value,
            "value": self.value,
            "status": self.status.value,
            "call_bound": self.call_bound,
            "put_bound": self.put_bound,
            "iterations": self.iterations,
            "solver_residuals": dict(self.residuals),
        }


def _require_order(spec: RelaxationSpec):
    if spec.order < 1:
        raise InfeasibleDegree(f"relaxation order must be >= 1, got {spec.order}")


def _price_equalities(index: MomentIndex, algebra: PayoffAlgebra) -> List[EqualityRow]:
    market = algebra.market
    rows = [EqualityRow("normalization", LinearForm.single(index.position(algebra.unit)), 1.0)]
    for i, forward in enumerate(market.forwards):
        rows.append(EqualityRow(f"forward x{i + 1}", LinearForm.single(index.position(algebra.x(i))), forward))
    for j in range(1, market.m + 1):
        rows.append(EqualityRow(
            f"price s{j}", LinearForm.single(index.position(algebra.straddle(j))), market.straddle_prices[j - 1]
        ))
    return rows


def _generator_localizers(algebra: PayoffAlgebra, localizer_set: LocalizerSet) -> List[Tuple[str, PolyElement]]:
    localizers = [(f"x{i + 1}", PolyElement.of(algebra.x(i))) for i in range(algebra.n)]
    if localizer_set == LocalizerSet.FULL:
        localizers += [(f"s{j}", PolyElement.of(algebra.straddle(j))) for j in algebra.straddle_generators]
    return localizers


def _parity_localizers(algebra: PayoffAlgebra) -> List[Tuple[str, PolyElement]]:
    """2*call = s + u and 2*put = s - u for every straddle generator"""
    localizers = []
    for j in algebra.straddle_generators:
        s = PolyElement.of(algebra.straddle(j))
        u = algebra.affine_part(j)
        localizers.append((f"call s{j}", s + u))
        localizers.append((f"put s{j}", s - u))
    return localizers


def _blocks(index: MomentIndex, algebra: PayoffAlgebra, order: int,
            localizers: Iterable[Tuple[str, PolyElement]]) -> List[SymbolicMatrix]:
    blocks = [moment_matrix(index, order, algebra)]
    for label, g in localizers:
        d = (2 * order - g.degree) // 2
        blocks.append(localizing_matrix(index, g, d, algebra, name=f"localizer {label}"))
    return blocks


def _objective(index: MomentIndex, algebra: PayoffAlgebra, side: Side) -> Tuple[LinearForm, int]:
    target = index.position(algebra.straddle(0))
    return LinearForm.single(target, side.sign), target


def assemble_compact(market: MarketSpec, spec: RelaxationSpec) -> ConicProblem:
    """Compact hierarchy: moment matrix, generator localizers, compactness block"""
    _require_order(spec)
    if not market.is_compact:
        raise UnboundedSupport("compact relaxation needs a support box")
    beta = spec.beta_override if spec.beta_override is not None else beta_bound(market)
    algebra = PayoffAlgebra(market, HierarchyMode.COMPACT, spec.reduce)
    index = algebra.build_index(2 * spec.order)

    localizers = _generator_localizers(algebra, spec.localizer_set)
    if spec.parity_localizers:
        localizers += _parity_localizers(algebra)
    localizers.append(("compactness", beta * algebra.one() - algebra.payoff_sum()))
    if spec.ball_localizer:
        localizers.append(("ball", beta ** 2 * algebra.one() - algebra.square_sum()))

    objective, target = _objective(index, algebra, spec.side)
    problem = ConicProblem(
        num_vars=index.size,
        objective=objective,
        equalities=_price_equalities(index, algebra),
        psd_blocks=_blocks(index, algebra, spec.order, localizers),
        index=index,
        algebra=algebra,
        spec=spec,
        beta=beta,
        target_position=target,
    )
    status(f"🔧 Compact relaxation N={spec.order}: {index.size} moments, {len(problem.psd_blocks)} blocks", TRACE)
    return problem


def linkage_rows(index: MomentIndex, algebra: PayoffAlgebra) -> List[EqualityRow]:
    """y(s,k) = y(s,k+1) + sum_i y(e_i^2 s, k+1), kept only when every term is indexed"""
    weight = algebra.one() + algebra.square_sum()
    aux = PolyElement.of(algebra.aux())
    rows = []
    for mono in index.monomials:
        shifted = algebra.multiply_poly(weight, algebra.multiply_poly(PolyElement.of(mono), aux))
        if not index.contains(shifted):
            continue
        form = LinearForm.single(index.position(mono)) - LinearForm(index.coefficients(shifted))
        rows.append(EqualityRow(f"linkage {mono.label()}", form, 0.0))
    return rows


def assemble_unbounded(market: MarketSpec, spec: RelaxationSpec) -> ConicProblem:
    """Unbounded hierarchy over (payoffs) x (aux weight); no compactness block"""
    _require_order(spec)
    algebra = PayoffAlgebra(market, HierarchyMode.UNBOUNDED, spec.reduce)
    index = algebra.build_index(2 * spec.order)

    localizers = _generator_localizers(algebra, spec.localizer_set)
    if spec.parity_localizers:
        localizers += _parity_localizers(algebra)

    objective, target = _objective(index, algebra, spec.side)
    equalities = _price_equalities(index, algebra) + linkage_rows(index, algebra)
    problem = ConicProblem(
        num_vars=index.size,
        objective=objective,
        equalities=equalities,
        psd_blocks=_blocks(index, algebra, spec.order, localizers),
        index=index,
        algebra=algebra,
        spec=spec,
        target_position=target,
    )
    status(f"🔧 Unbounded relaxation N={spec.order}: {index.size} moments, "
           f"{len(equalities)} equalities", TRACE)
    return problem


def assemble(market: MarketSpec, spec: RelaxationSpec) -> ConicProblem:
    if spec.mode == HierarchyMode.COMPACT:
        return assemble_compact(market, spec)
    return assemble_unbounded(market, spec)


def solve_bound(problem: ConicProblem, solver=None, tol: Optional[float] = None,
                settings: Optional[SolverSettings] = None) -> BoundResult:
    """Solve one relaxation; value is the target straddle bound on the requested side"""
    from sdp_solver import ConicStatus, InteriorPointBackend, canonicalize, decanonicalize

    settings = (settings or load_solver_settings()).with_overrides(tol=tol)
    backend = solver or InteriorPointBackend()
    spec = problem.spec
    started = time.perf_counter()

    sf = canonicalize(problem)
    raw = backend.solve(sf, settings)
    solution = decanonicalize(sf, raw)

    status_map = {
        ConicStatus.OPTIMAL: SolveStatus.OPTIMAL,
        ConicStatus.PRIMAL_INFEASIBLE: SolveStatus.PRIMAL_INFEASIBLE,
        ConicStatus.DUAL_INFEASIBLE: SolveStatus.DUAL_INFEASIBLE,
    }
    outcome = status_map.get(solution.status, SolveStatus.INACCURATE)
    value = call = put = None
    if outcome == SolveStatus.OPTIMAL:
        # sign * f'lam: the dual objective is the bound certified by the hedge
        value = spec.side.sign * float(solution.dual_objective)
        target = problem.market.target
        call = to_call(value, target, problem.market)
        put = to_put(value, target, problem.market)

    result = BoundResult(
        side=spec.side,
        order=spec.order,
        mode=spec.mode,
        status=outcome,
        value=value,
        y=solution.y,
        dual=solution,
        residuals=dict(solution.residuals),
        call_bound=call,
        put_bound=put,
        iterations=solution.iterations,
        elapsed=time.perf_counter() - started,
    )
    if outcome == SolveStatus.PRIMAL_INFEASIBLE:
        status(f"⚠️ Static arbitrage detected at order {spec.order}: no representing measure")
    elif value is not None:
        status(f"✅ {spec.mode.value} {spec.side.value} bound N={spec.order}: {value:.10g} "
               f"({solution.status.value}, {solution.iterations} iterations)")
    else:
        status(f"❌ {spec.side.value} bound N={spec.order}: {solution.status.value}")
    return result


def compute_bound(market: MarketSpec, spec: RelaxationSpec, settings: Optional[SolverSettings] = None,
                  solver=None) -> Tuple[ConicProblem, BoundResult]:
    problem = assemble(market, spec)
    return problem, solve_bound(problem, solver, settings=settings)


def sweep_orders(market: MarketSpec, orders: Iterable[int], mode: HierarchyMode = HierarchyMode.COMPACT,
                 reduce: bool = True, localizer_set: LocalizerSet = LocalizerSet.FULL,
                 settings: Optional[SolverSettings] = None, **extras) -> pd.DataFrame:
    """Lower and upper bounds for each order, one row per order"""
    rows = []
    for order in orders:
        row: Dict[str, Any] = {"order": order}
        for side in Side:
            spec = RelaxationSpec(order, mode, side, reduce, localizer_set, **extras)
            _, result = compute_bound(market, spec, settings)
            row[side.value] = result.value
            row[f"{side.value}_status"] = result.status.value
            row[f"{side.value}_call"] = result.call_bound
            row[f"{side.value}_seconds"] = round(result.elapsed, 4)
        lower, upper = row["lower"], row["upper"]
        row["width"] = upper - lower if lower is not None and upper is not None else None
        rows.append(row)
    return pd.DataFrame(rows)
