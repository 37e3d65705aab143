#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test Acceptance Suite
End-to-end properties on seeded random markets: bracketing, monotone tightening,
certificates, arbitrage detection, measure feasibility and the unbounded hierarchy
"""

import os
import time
from functools import lru_cache

import numpy as np
import pytest

from bound_errors import GridInfeasible
from bounds_cli import EXIT_ARBITRAGE, RunConfig, run
from grid_oracle import DiscreteMeasure, GridSpec, lp_bounds, measure_moments, price, random_consistent_market
from hedging_certificate import check_certificate, extract
from market_spec import BasketDef, MarketSpec, SupportKind, beta_bound
from moment_matrices import localizing_matrix, min_eigenvalue, moment_matrix
from payoff_semigroup import HierarchyMode, Monomial, PayoffAlgebra, PolyElement
from relaxation_builder import RelaxationSpec, Side, SolveStatus, compute_bound, sweep_orders
from sdp_solver import PsdBlock, StandardForm, solve

SUITE_SIZE = 50
MARKETS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "markets")


def merton(support=SupportKind.COMPACT):
    box = (2.0,) if support == SupportKind.COMPACT else None
    return MarketSpec(1, (1.0,), (BasketDef((1.0,), 1.0),), (), support, box)


def suite_market(seed):
    return random_consistent_market(seed, 1 + seed % 2, seed % 3)


@lru_cache(maxsize=None)
def suite_sweep(seed):
    market, _ = suite_market(seed)
    return sweep_orders(market, [1, 2])


def test_merton_instance():
    started = time.perf_counter()
    _, lower = compute_bound(merton(), RelaxationSpec(2, side=Side.LOWER))
    assert lower.status == SolveStatus.OPTIMAL
    assert -1e-5 <= lower.value <= 1e-5

    _, upper = compute_bound(merton(), RelaxationSpec(3, side=Side.UPPER))
    assert upper.status == SolveStatus.OPTIMAL
    assert upper.value >= 1.0 - 1e-6
    assert upper.value == pytest.approx(1.0, abs=5e-2)

    oracle = lp_bounds(merton(), GridSpec(401))
    assert oracle.lower == pytest.approx(0.0, abs=1e-9)
    assert oracle.upper == pytest.approx(1.0, abs=1e-9)
    assert time.perf_counter() - started <= 20.0


def test_bracketing_suite():
    gridded = 0
    for seed in range(SUITE_SIZE):
        market, measure = suite_market(seed)
        sweep = suite_sweep(seed)
        row = sweep.iloc[1]
        assert row["lower_status"] == "Optimal" and row["upper_status"] == "Optimal", seed
        target = price(measure, market.target)
        assert row["lower"] - 1e-6 <= target <= row["upper"] + 1e-6, seed

        try:
            oracle = lp_bounds(market, GridSpec(201 if market.n == 1 else 101))
        except GridInfeasible:
            continue
        gridded += 1
        assert row["lower"] - 1e-5 <= oracle.lower, seed
        assert oracle.upper <= row["upper"] + 1e-5, seed
    assert gridded >= SUITE_SIZE // 2


def test_monotone_tightening():
    for seed in range(SUITE_SIZE):
        sweep = suite_sweep(seed)
        first, second = sweep.iloc[0], sweep.iloc[1]
        assert first["lower"] <= second["lower"] + 1e-6, seed
        assert first["upper"] >= second["upper"] - 1e-6, seed


def test_certificate_suite():
    checked = 0
    for seed in range(10):
        market, _ = suite_market(seed)
        for side in Side:
            problem, result = compute_bound(market, RelaxationSpec(2, side=side))
            if result.status != SolveStatus.OPTIMAL:
                continue
            cert = extract(problem, result.dual)
            assert cert.bound == pytest.approx(result.value, abs=1e-6 * (1 + abs(result.value))), seed
            report = check_certificate(cert, samples=10_000, seed=seed)
            assert report.max_residual <= 1e-5 * (1 + cert.beta ** 4), seed
            assert report.min_slack >= -1e-5, seed
            checked += 1
    assert checked >= 16


def test_arbitrage_detection():
    baskets = (BasketDef((1.0,), 1.0), BasketDef((1.0,), 1.5))
    market = MarketSpec(1, (1.0,), baskets, (0.45,), SupportKind.COMPACT, (2.0,))
    _, result = compute_bound(market, RelaxationSpec(1))
    assert result.status == SolveStatus.PRIMAL_INFEASIBLE
    assert result.value is None and result.call_bound is None

    code, _ = run(RunConfig("bound", os.path.join(MARKETS, "jensen_violation.json"), order=1))
    assert code == EXIT_ARBITRAGE

    with pytest.raises(GridInfeasible):
        lp_bounds(market, GridSpec(201))


def test_random_measures_give_psd_matrices():
    rng = np.random.default_rng(2024)
    baskets = (BasketDef((1.0, 1.0), 2.0), BasketDef((1.0, -1.0), 0.0), BasketDef((0.5, 1.0), 1.0))
    market = MarketSpec(2, (1.0, 1.0), baskets, (0.6, 0.5), SupportKind.COMPACT, (2.0, 2.0))
    beta = beta_bound(market)
    for reduce in (False, True):
        algebra = PayoffAlgebra(market, HierarchyMode.COMPACT, reduce)
        index = algebra.build_index(4)
        localizers = [PolyElement.of(algebra.x(i)) for i in range(market.n)]
        localizers += [PolyElement.of(algebra.straddle(j)) for j in algebra.straddle_generators]
        localizers.append(beta * algebra.one() - algebra.payoff_sum())
        blocks = [moment_matrix(index, 2, algebra)]
        blocks += [localizing_matrix(index, g, (4 - g.degree) // 2, algebra) for g in localizers]
        for _ in range(100):
            atoms = int(rng.integers(1, 8))
            measure = DiscreteMeasure(rng.uniform(0.0, 2.0, (atoms, 2)), rng.dirichlet(np.ones(atoms)))
            y = measure_moments(measure, index, algebra)
            for block in blocks:
                assert min_eigenvalue(block, y) >= -1e-9, block.name


def test_semigroup_homomorphism():
    rng = np.random.default_rng(99)
    baskets = (BasketDef((1.0, 1.0), 2.0), BasketDef((1.0, -0.5), 0.3))
    market = MarketSpec(2, (1.0, 1.0), baskets, (0.5,), SupportKind.COMPACT, (2.0, 2.0))
    for reduce in (False, True):
        algebra = PayoffAlgebra(market, HierarchyMode.UNBOUNDED, reduce)
        for _ in range(1000):
            a, b = (Monomial(tuple(rng.integers(0, 3, 2).tolist()), tuple(rng.integers(0, 3, 2).tolist()),
                             int(rng.integers(0, 2))) for _ in range(2))
            x = rng.uniform(0.0, 2.0, 2)
            lhs = algebra.evaluate(algebra.multiply(a, b), x)
            rhs = algebra.evaluate(PolyElement.of(a), x) * algebra.evaluate(PolyElement.of(b), x)
            np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-9)


def test_analytic_solver_instance():
    mats = np.array([np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])])
    sf = StandardForm(c=np.array([0.0, 1.0]), E=np.array([[1.0, 0.0]]), f=np.array([1.0]),
                      blocks=[PsdBlock("toeplitz", 2, np.array([0, 1]), mats)], lp_rows=np.zeros((0, 2)))
    assert solve(sf).y[1] == pytest.approx(-1.0, abs=1e-7)


def test_unbounded_smoke():
    _, compact = compute_bound(merton(), RelaxationSpec(2))
    _, unbounded = compute_bound(merton(SupportKind.UNBOUNDED), RelaxationSpec(2, HierarchyMode.UNBOUNDED))
    assert unbounded.status == SolveStatus.OPTIMAL
    assert -1e-5 <= unbounded.value <= compact.value + 1e-5

    code, report = run(RunConfig("hedge", os.path.join(MARKETS, "merton_unbounded.json"), order=2,
                                 mode=HierarchyMode.UNBOUNDED))
    assert code == 0
    assert report["certificate"] is None


def main():
    print("🧪 Running acceptance suite")
    print("=" * 50)
    tests = [obj for name, obj in sorted(globals().items()) if name.startswith("test_") and callable(obj)]
    failed = 0
    for test in tests:
        try:
            test()
            print(f"✅ {test.__name__}")
        except Exception as e:
            failed += 1
            print(f"❌ {test.__name__}: {e}")
    print("=" * 50)
    print("✅ All tests passed!" if not failed else f"❌ {failed} test(s) failed")
    return failed == 0


if __name__ == "__main__":
    main()
