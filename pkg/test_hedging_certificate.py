#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test Hedging Certificate
Extraction from optimal duals, the sampled replication check, portfolio payoffs and serialization
"""

import os
import tempfile

import numpy as np
import pytest

from bound_errors import CertificateError, DimensionMismatch, NotOptimal
from market_spec import BasketDef, MarketSpec, SupportKind
from hedging_certificate import (HedgeCertificate, check_certificate, evaluate_portfolio, extract, load_certificate,
                                 positions_frame, save_certificate)
from payoff_semigroup import HierarchyMode
from relaxation_builder import RelaxationSpec, Side, compute_bound


def merton():
    return MarketSpec(1, (1.0,), (BasketDef((1.0,), 1.0),), (), SupportKind.COMPACT, (2.0,))


def quoted_copy():
    """Target identical to the quoted straddle"""
    baskets = (BasketDef((1.0,), 1.0), BasketDef((1.0,), 1.0))
    return MarketSpec(1, (1.0,), baskets, (0.4,), SupportKind.COMPACT, (2.0,))


def certificate(market, order, side):
    problem, result = compute_bound(market, RelaxationSpec(order, side=side))
    return result, extract(problem, result.dual)


def test_merton_lower_certificate():
    result, cert = certificate(merton(), 2, Side.LOWER)
    assert cert.bound == pytest.approx(result.value, abs=1e-6 * (1 + abs(result.value)))
    assert abs(cert.bound) <= 1e-5
    report = check_certificate(cert, samples=2000, seed=1)
    assert report.passed
    assert report.max_residual <= report.tolerance
    assert report.min_slack >= -1e-4
    assert report.min_sos >= -1e-8
    assert evaluate_portfolio(cert, [1.0]) <= merton().target.payoff([1.0]) + 1e-4


def test_two_point_upper_certificate():
    result, cert = certificate(merton(), 3, Side.UPPER)
    assert cert.bound == pytest.approx(result.value, abs=1e-6 * (1 + abs(result.value)))
    assert 1.0 - 1e-6 <= cert.bound <= 1.05
    report = check_certificate(cert, samples=2000, seed=2)
    assert report.passed
    # super-replication: the portfolio pays at least the target everywhere
    X = np.array([[0.0], [0.5], [1.0], [2.0]])
    assert np.all(evaluate_portfolio(cert, X) >= merton().target.payoff(X) - 1e-3)


def test_quoted_target_replicates_by_identity():
    for side in Side:
        result, cert = certificate(quoted_copy(), 1, side)
        assert result.value == pytest.approx(0.4, abs=1e-6)
        np.testing.assert_allclose(cert.straddle_positions, [1.0], atol=1e-5)
        np.testing.assert_allclose(cert.forward_positions, [0.0], atol=1e-5)
        assert cert.cash == pytest.approx(0.0, abs=1e-5)
        assert max(np.max(np.abs(q.gram)) for q in cert.sos) <= 1e-4


def test_perturbed_certificate_is_detected():
    _, cert = certificate(merton(), 2, Side.LOWER)
    cert.forward_positions = cert.forward_positions + 0.1
    report = check_certificate(cert, samples=2000, seed=3)
    assert report.max_residual > 0.01
    assert not report.passed


def test_evaluate_portfolio_examples():
    market = quoted_copy()
    cash_only = HedgeCertificate(Side.LOWER, 1, 0.3, np.zeros(1), np.zeros(1), 0.3, [], 3.0, market)
    assert evaluate_portfolio(cash_only, [1.7]) == pytest.approx(0.3)

    unit = HedgeCertificate(Side.LOWER, 1, 0.4, np.ones(1), np.zeros(1), 0.0, [], 3.0, market)
    assert evaluate_portfolio(unit, [2.0]) == pytest.approx(1.0)
    assert unit.portfolio_price() == pytest.approx(0.4)

    with pytest.raises(DimensionMismatch):
        evaluate_portfolio(unit, [1.0, 1.0])


def test_extract_errors():
    baskets = (BasketDef((1.0,), 1.0), BasketDef((1.0,), 1.5))
    violation = MarketSpec(1, (1.0,), baskets, (0.45,), SupportKind.COMPACT, (2.0,))
    problem, result = compute_bound(violation, RelaxationSpec(1))
    with pytest.raises(NotOptimal):
        extract(problem, result.dual)

    unbounded = MarketSpec(1, (1.0,), (BasketDef((1.0,), 1.0),), (), SupportKind.UNBOUNDED)
    problem, result = compute_bound(unbounded, RelaxationSpec(1, HierarchyMode.UNBOUNDED))
    with pytest.raises(CertificateError):
        extract(problem, result.dual)


def test_save_and_load():
    _, cert = certificate(merton(), 2, Side.LOWER)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "certificate.json")
        save_certificate(cert, path)
        loaded = load_certificate(path, merton())
    assert loaded.side == cert.side and loaded.order == cert.order
    assert [q.name for q in loaded.sos] == [q.name for q in cert.sos]
    np.testing.assert_allclose(loaded.forward_positions, cert.forward_positions)
    assert check_certificate(loaded, samples=500).max_residual == pytest.approx(
        check_certificate(cert, samples=500).max_residual, abs=1e-12)

    wrong = MarketSpec(1, (1.0,), quoted_copy().baskets, (0.4,), SupportKind.COMPACT, (2.0,))
    with pytest.raises(DimensionMismatch):
        HedgeCertificate.from_dict(cert.to_dict(), wrong)


def test_positions_frame():
    _, cert = certificate(quoted_copy(), 1, Side.LOWER)
    frame = positions_frame(cert)
    assert list(frame["instrument"]) == ["cash", "forward x1", "straddle s1 (K=1)"]
    assert frame["value"].sum() == pytest.approx(cert.bound, abs=1e-8)


def main():
    print("🧪 Testing hedging certificates")
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
