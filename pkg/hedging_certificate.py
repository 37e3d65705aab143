#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Hedging Certificate
Static sub/super-replicating portfolio read off the dual of a compact relaxation:
positions in the quoted straddles and forwards, cash, and sum-of-squares multipliers

Purpose: Extract certificates, verify the replication identity at sampled points, serialize them
"""

import json
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from bound_errors import CertificateError, DimensionMismatch, MarketFileError, NotOptimal
from bound_settings import SolverSettings, load_solver_settings, status
from market_spec import MarketSpec
from payoff_semigroup import HierarchyMode, Monomial, PayoffAlgebra, PolyElement
from relaxation_builder import ConicProblem, Side


@dataclass
class SosPoly:
    """q(x) = z(x)' gram z(x) over a monomial basis, multiplying the localizer g"""
    name: str
    gram: np.ndarray
    basis: Tuple[Monomial, ...]
    localizer: Optional[PolyElement] = None

    def values(self, X, algebra: PayoffAlgebra) -> np.ndarray:
        Z = algebra.monomial_values(self.basis, X)
        return np.einsum("pi,ij,pj->p", Z, self.gram, Z)

    def normalized_values(self, X, algebra: PayoffAlgebra) -> np.ndarray:
        """q(x) / |z(x)|^2"""
        Z = algebra.monomial_values(self.basis, X)
        return np.einsum("pi,ij,pj->p", Z, self.gram, Z) / np.maximum(np.sum(Z ** 2, axis=1), 1e-300)

    def weighted_values(self, X, algebra: PayoffAlgebra) -> np.ndarray:
        q = self.values(X, algebra)
        if self.localizer is None:
            return q
        return algebra.evaluate_many(self.localizer, X) * q

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "localizer": None if self.localizer is None else self.localizer.to_list(),
            "basis": [mono.to_list() for mono in self.basis],
            "matrix": self.gram.tolist(),
        }

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "SosPoly":
        localizer = raw.get("localizer")
        return cls(
            name=str(raw["name"]),
            gram=np.asarray(raw["matrix"], dtype=float),
            basis=tuple(Monomial.from_list(mono) for mono in raw["basis"]),
            localizer=None if localizer is None else PolyElement.from_list(localizer),
        )


@dataclass
class HedgeCertificate:
    """side*(target - portfolio) = sum_k g_k q_k holds identically on the support"""
    side: Side
    order: int
    bound: float
    straddle_positions: np.ndarray
    forward_positions: np.ndarray
    cash: float
    sos: List[SosPoly]
    beta: float
    market: MarketSpec
    reduce: bool = True

    def portfolio_price(self) -> float:
        return float(self.straddle_positions @ np.asarray(self.market.straddle_prices, dtype=float)
                     + self.forward_positions @ self.market.p + self.cash)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "side": self.side.value,
            "order": self.order,
            "bound": self.bound,
            "beta": self.beta,
            "reduce": self.reduce,
            "lambda": {
                "straddles": self.straddle_positions.tolist(),
                "forwards": self.forward_positions.tolist(),
            },
            "cash": self.cash,
            "gram_blocks": [q.to_dict() for q in self.sos],
        }

    @classmethod
    def from_dict(cls, raw: Dict[str, Any], market: MarketSpec) -> "HedgeCertificate":
        try:
            cert = cls(
                side=Side(raw["side"]),
                order=int(raw["order"]),
                bound=float(raw["bound"]),
                straddle_positions=np.asarray(raw["lambda"]["straddles"], dtype=float),
                forward_positions=np.asarray(raw["lambda"]["forwards"], dtype=float),
                cash=float(raw["cash"]),
                sos=[SosPoly.from_dict(block) for block in raw["gram_blocks"]],
                beta=float(raw["beta"]),
                market=market,
                reduce=bool(raw.get("reduce", True)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise MarketFileError(f"malformed certificate: {e}")
        if len(cert.straddle_positions) != market.m or len(cert.forward_positions) != market.n:
            raise DimensionMismatch("certificate positions do not match the market")
        return cert


@dataclass
class CheckReport:
    max_residual: float
    min_slack: float
    min_sos: float
    samples: int
    tolerance: float
    bound_gap: float = 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance and self.min_slack >= -self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "max_residual": self.max_residual,
            "min_slack": self.min_slack,
            "min_sos": self.min_sos,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "bound_gap": self.bound_gap,
            "passed": self.passed,
        }


def _clip_gram(Q: np.ndarray, name: str, tol: float) -> np.ndarray:
    Q = 0.5 * (Q + Q.T)
    eigvals, eigvecs = np.linalg.eigh(Q)
    floor = -10.0 * tol * (1.0 + np.max(np.abs(eigvals), initial=0.0))
    if eigvals.size and eigvals[0] < floor:
        raise CertificateError(f"Gram matrix of {name} has eigenvalue {eigvals[0]:.3e} below {floor:.3e}")
    return (eigvecs * np.clip(eigvals, 0.0, None)) @ eigvecs.T


def extract(problem: ConicProblem, sol, settings: Optional[SolverSettings] = None) -> HedgeCertificate:
    """Certificate from an optimal compact solution; sol is a ConicSolution or a BoundResult"""
    from sdp_solver import ConicStatus

    solution = getattr(sol, "dual", None) or sol
    if problem.spec.mode != HierarchyMode.COMPACT:
        raise CertificateError("certificates are only emitted for the compact hierarchy")
    if solution.status != ConicStatus.OPTIMAL:
        raise NotOptimal(f"certificate needs an optimal solution, solver reported {solution.status.value}")
    if solution.block_duals is None:
        raise CertificateError("solution carries no per-block duals; decanonicalize it first")

    settings = settings or load_solver_settings()
    market = problem.market
    sign = problem.spec.side.sign
    straddles, forwards, cash = np.zeros(market.m), np.zeros(market.n), 0.0
    for row, lam in zip(problem.equalities, solution.lam):
        kind, _, label = row.name.partition(" ")
        if kind == "normalization":
            cash = sign * lam
        elif kind == "forward":
            forwards[int(label[1:]) - 1] = sign * lam
        elif kind == "price":
            straddles[int(label[1:]) - 1] = sign * lam

    sos = []
    for block, Q in zip(problem.psd_blocks, solution.block_duals):
        sos.append(SosPoly(block.name, _clip_gram(Q, block.name, settings.tol), block.basis, block.localizer))

    cert = HedgeCertificate(
        side=problem.spec.side,
        order=problem.spec.order,
        bound=0.0,
        straddle_positions=straddles,
        forward_positions=forwards,
        cash=float(cash),
        sos=sos,
        beta=float(problem.beta),
        market=market,
        reduce=problem.spec.reduce,
    )
    cert.bound = cert.portfolio_price()
    status(f"📜 {cert.side.value} certificate N={cert.order}: portfolio price {cert.bound:.10g}")
    return cert


def evaluate_portfolio(cert: HedgeCertificate, x) -> np.ndarray:
    """Payoff of the tradable side: straddle and forward positions plus cash"""
    market = cert.market
    X = np.atleast_2d(np.asarray(x, dtype=float))
    if X.shape[1] != market.n:
        raise DimensionMismatch(f"points have {X.shape[1]} coordinates, market has {market.n} assets")
    payoff = cert.cash + X @ cert.forward_positions
    for j in range(1, market.m + 1):
        payoff = payoff + cert.straddle_positions[j - 1] * market.baskets[j].payoff(X)
    return payoff if np.ndim(x) > 1 else float(payoff[0])


def sample_support(market: MarketSpec, beta: float, samples: int, seed: int) -> np.ndarray:
    """Uniform points of the support box with sum of payoffs <= beta"""
    rng = np.random.default_rng(seed)
    box = market.box
    accepted: List[np.ndarray] = []
    count, attempts = 0, 0
    while count < samples and attempts < 50:
        X = rng.uniform(0.0, 1.0, size=(max(samples, 16), market.n)) * box
        X = X[market.payoffs(X).sum(axis=1) <= beta + 1e-12]
        accepted.append(X)
        count += X.shape[0]
        attempts += 1
    if count == 0:
        raise CertificateError("no sample point satisfies the compactness constraint")
    return np.vstack(accepted)[:samples]


def check_certificate(cert: HedgeCertificate, market: Optional[MarketSpec] = None, samples: int = 10000,
                      seed: int = 0) -> CheckReport:
    """Sampled replication residual and hedge slack; report only"""
    market = market or cert.market
    algebra = PayoffAlgebra(market, HierarchyMode.COMPACT, cert.reduce)
    X = sample_support(market, cert.beta, samples, seed)
    slack = cert.side.sign * (market.target.payoff(X) - evaluate_portfolio(cert, X))
    sos_total = np.zeros(X.shape[0])
    min_sos = np.inf
    for q in cert.sos:
        sos_total += q.weighted_values(X, algebra)
        min_sos = min(min_sos, float(np.min(q.normalized_values(X, algebra))))
    residual = np.abs(slack - sos_total)
    tolerance = 1e-5 * (1.0 + cert.beta ** (2 * cert.order))
    report = CheckReport(
        max_residual=float(np.max(residual)),
        min_slack=float(np.min(slack)),
        min_sos=float(min_sos) if np.isfinite(min_sos) else 0.0,
        samples=int(X.shape[0]),
        tolerance=tolerance,
        bound_gap=abs(cert.bound - cert.portfolio_price()),
    )
    icon = "✅" if report.passed else "❌"
    status(f"{icon} Certificate check on {report.samples} points: residual {report.max_residual:.3e}, "
           f"slack {report.min_slack:.3e}")
    return report


def positions_frame(cert: HedgeCertificate) -> pd.DataFrame:
    """Tradable positions of a certificate with their current prices"""
    market = cert.market
    rows = [{"instrument": "cash", "position": cert.cash, "price": 1.0}]
    for i, forward in enumerate(market.forwards):
        rows.append({"instrument": f"forward x{i + 1}", "position": cert.forward_positions[i], "price": forward})
    for j in range(1, market.m + 1):
        basket = market.baskets[j]
        rows.append({
            "instrument": f"straddle s{j} (K={basket.strike:g})",
            "position": cert.straddle_positions[j - 1],
            "price": market.straddle_prices[j - 1],
        })
    frame = pd.DataFrame(rows)
    frame["value"] = frame["position"] * frame["price"]
    return frame


def save_certificate(cert: HedgeCertificate, path: str):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(cert.to_dict(), f, indent=2)


def load_certificate(path: str, market: MarketSpec) -> HedgeCertificate:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise MarketFileError(f"invalid certificate JSON: {e.msg}", e.lineno, e.colno)
    except OSError as e:
        raise MarketFileError(f"cannot read {path}: {e.strerror}")
    return HedgeCertificate.from_dict(raw, market)
