#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test SDP Solver
Interior-point backend on analytic instances, LP paths, infeasibility and the text export
"""

import numpy as np
import pytest

from bound_errors import MarketFileError, SolverFailure, StandardFormError
from bound_settings import SolverSettings
from market_spec import BasketDef, MarketSpec, SupportKind
from relaxation_builder import RelaxationSpec, assemble_compact
from sdp_solver import (ConicStatus, HighsLPBackend, InteriorPointBackend, NewtonSystem, PsdBlock, StandardForm,
                        canonicalize, complementarity, decanonicalize, farkas_residual, get_backend, solve)


def toeplitz_form():
    """min y2 s.t. y1 = 1, [[y1, y2], [y2, y1]] PSD; optimum y2 = -1"""
    mats = np.array([np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])])
    return StandardForm(
        c=np.array([0.0, 1.0]), E=np.array([[1.0, 0.0]]), f=np.array([1.0]),
        blocks=[PsdBlock("toeplitz", 2, np.array([0, 1]), mats)], lp_rows=np.zeros((0, 2)),
    )


def interval_lp():
    """min y2 s.t. y1 = 1, y1 - y2 >= 0, y1 + y2 >= 0"""
    return StandardForm(
        c=np.array([0.0, 1.0]), E=np.array([[1.0, 0.0]]), f=np.array([1.0]), blocks=[],
        lp_rows=np.array([[1.0, -1.0], [1.0, 1.0]]),
    )


def merton_problem(order=1):
    market = MarketSpec(1, (1.0,), (BasketDef((1.0,), 1.0),), (), SupportKind.COMPACT, (2.0,))
    return assemble_compact(market, RelaxationSpec(order, parity_localizers=False, ball_localizer=False))


def test_toeplitz_optimum():
    result = solve(toeplitz_form())
    assert result.status == ConicStatus.OPTIMAL
    assert result.y[1] == pytest.approx(-1.0, abs=1e-7)
    assert result.primal_objective == pytest.approx(-1.0, abs=1e-7)


def test_weak_duality_and_complementarity():
    sf = toeplitz_form()
    result = solve(sf)
    assert result.dual_objective <= result.primal_objective + 1e-7
    tol = SolverSettings().tol
    for value in complementarity(result):
        assert abs(value) <= 10 * tol * (1 + np.linalg.norm(sf.c))
    for Q in result.Q:
        assert np.linalg.eigvalsh(Q)[0] >= -1e-8


def test_dual_feasibility_reconstructs_c():
    sf = canonicalize(merton_problem(2))
    result = solve(sf)
    assert result.status == ConicStatus.OPTIMAL
    K = sf.E.T @ result.lam + sf.lp_rows.T @ result.lp_dual
    for block, Q in zip(sf.blocks, result.Q):
        K = K + block.adjoint(Q, sf.num_vars)
    np.testing.assert_allclose(K, sf.c, atol=1e-6)


def test_inconsistent_equalities_are_primal_infeasible():
    sf = StandardForm(c=np.array([1.0]), E=np.array([[1.0], [1.0]]), f=np.array([1.0, 2.0]),
                      blocks=[], lp_rows=np.zeros((0, 1)))
    assert solve(sf).status == ConicStatus.PRIMAL_INFEASIBLE


def test_unbounded_linear_objective_is_dual_infeasible():
    sf = StandardForm(c=np.array([0.0, 1.0]), E=np.array([[1.0, 0.0]]), f=np.array([1.0]),
                      blocks=[], lp_rows=np.zeros((0, 2)))
    assert solve(sf).status == ConicStatus.DUAL_INFEASIBLE


def test_straddle_below_jensen_floor_yields_farkas_ray():
    baskets = (BasketDef((1.0,), 1.0), BasketDef((1.0,), 1.5))
    market = MarketSpec(1, (1.0,), baskets, (0.45,), SupportKind.COMPACT, (2.0,))
    sf = canonicalize(assemble_compact(market, RelaxationSpec(1)))
    result = solve(sf)
    assert result.status == ConicStatus.PRIMAL_INFEASIBLE
    assert result.y is None and result.primal_objective is None
    assert result.dual_objective == pytest.approx(1.0)
    assert farkas_residual(sf, result) <= 1e-6
    for Q in result.Q:
        assert np.linalg.eigvalsh(Q)[0] >= -1e-8
    assert np.all(result.lp_dual >= -1e-9)


def test_equalities_hold_at_optimum():
    sf = canonicalize(merton_problem(2))
    result = solve(sf)
    assert result.status == ConicStatus.OPTIMAL
    np.testing.assert_allclose(sf.E @ result.y, sf.f, atol=1e-7)
    assert result.residuals["primal_eq"] <= SolverSettings().tol


def test_newton_system_meets_equalities_with_singular_hessian():
    H = np.diag([1.0, 0.0, 0.0])
    E = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    top, bottom = np.array([2.0, -1.0, 3.0]), np.array([0.5, -4.0])
    a, b = NewtonSystem(H, E, delta=1e-9).solve(top, bottom)
    np.testing.assert_allclose(E @ a, bottom, atol=1e-12)
    np.testing.assert_allclose(H @ a + E.T @ b, top, atol=1e-12)


def test_lp_rows_on_both_backends():
    for backend in (InteriorPointBackend(), HighsLPBackend()):
        result = solve(interval_lp(), backend=backend)
        assert result.status == ConicStatus.OPTIMAL, backend.name
        assert result.y[1] == pytest.approx(-1.0, abs=1e-7)
        assert np.all(result.lp_dual >= -1e-9)


def test_canonicalize_single_cell_block_is_lp_row():
    problem = merton_problem(1)
    sf = canonicalize(problem)
    assert len(sf.blocks) == 1 and sf.blocks[0].dim == 3
    assert sf.lp_rows.shape == (3, problem.num_vars)
    assert sf.lp_names == ["localizer x1", "localizer s0", "localizer compactness"]
    assert sf.variable_names == ["1", "s0", "x1", "s0*x1", "x1^2"]

    result = decanonicalize(sf, solve(sf))
    assert len(result.block_duals) == len(problem.psd_blocks)
    assert [Q.shape for Q in result.block_duals] == [(b.dim, b.dim) for b in problem.psd_blocks]


def test_deterministic():
    sf = canonicalize(merton_problem(2))
    first, second = solve(sf), solve(sf)
    assert first.status == second.status
    assert np.array_equal(first.y, second.y)
    assert first.iterations == second.iterations


def test_text_export_reloads():
    sf = canonicalize(merton_problem(2))
    again = StandardForm.from_text(sf.to_text())
    np.testing.assert_array_equal(again.c, sf.c)
    np.testing.assert_array_equal(again.E, sf.E)
    np.testing.assert_array_equal(again.lp_rows, sf.lp_rows)
    assert [(b.name, b.dim) for b in again.blocks] == [(b.name, b.dim) for b in sf.blocks]
    assert solve(again).primal_objective == pytest.approx(solve(sf).primal_objective, abs=1e-9)


def test_text_export_parse_errors():
    with pytest.raises(StandardFormError) as info:
        StandardForm.from_text("vars 2\nequalities 1\nblocks 0\nlprows 0\neq 0 zz 1.0\n")
    assert info.value.line == 5
    with pytest.raises(StandardFormError) as info:
        StandardForm.from_text("vars 1\nbogus 0 1\n")
    assert info.value.line == 2
    with pytest.raises(StandardFormError) as info:
        StandardForm.from_text("vars two\n")
    assert info.value.line == 1
    assert not isinstance(info.value, MarketFileError)


def test_backend_errors():
    with pytest.raises(SolverFailure):
        get_backend("cvx")
    with pytest.raises(SolverFailure):
        HighsLPBackend().solve(toeplitz_form(), SolverSettings())
    with pytest.raises(SolverFailure):
        solve(toeplitz_form(), tol=-1.0)


def main():
    print("🧪 Testing SDP solver")
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
