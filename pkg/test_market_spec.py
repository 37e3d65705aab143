#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test Market Specification
Quote conversion, validation, beta and the market file format
"""

import json

import numpy as np
import pytest

from bound_errors import MarketFileError, MarketValidationError, NegativeResult, UnboundedSupport
from market_spec import (BasketDef, MarketSpec, QuoteKind, QuoteSet, SupportKind, baskets_frame, beta_bound,
                         market_to_dict, parse_market, to_call, to_put, to_straddle, validate)


def one_asset(strike=1.0, forward=1.0, quoted=(), box=(2.0,)):
    """Target straddle at `strike`; quoted is a list of (strike, straddle price)"""
    baskets = (BasketDef((1.0,), strike),) + tuple(BasketDef((1.0,), k) for k, _ in quoted)
    prices = tuple(p for _, p in quoted)
    support = SupportKind.COMPACT if box else SupportKind.UNBOUNDED
    return MarketSpec(1, (forward,), baskets, prices, support, box)


def test_to_straddle_conversions():
    market = one_asset(quoted=[(1.0, 0.0)])
    assert to_straddle(QuoteSet(1, QuoteKind.CALL, 0.5), market) == pytest.approx(1.0)
    assert to_straddle(QuoteSet(1, QuoteKind.STRADDLE, 0.7), market) == pytest.approx(0.7)

    market = one_asset(forward=1.5, quoted=[(1.0, 0.0)], box=(3.0,))
    assert to_straddle(QuoteSet(1, QuoteKind.PUT, 0.2), market) == pytest.approx(0.9)


def test_to_straddle_rejects_negative_result():
    market = one_asset(forward=1.5, quoted=[(1.0, 0.0)], box=(3.0,))
    with pytest.raises(NegativeResult):
        to_straddle(QuoteSet(1, QuoteKind.CALL, 0.1), market)


def test_to_straddle_rejects_index_outside_quoted_baskets():
    market = one_asset(quoted=[(1.0, 0.0)])
    for index in (-1, 0, 2, 5):
        with pytest.raises(MarketValidationError):
            to_straddle(QuoteSet(index, QuoteKind.STRADDLE, 0.5), market)


def test_parity_round_trip():
    market = one_asset(forward=1.3, quoted=[(1.0, 0.0)], box=(3.0,))
    basket = market.baskets[1]
    for straddle in (0.3, 0.55, 1.7):
        call = to_call(straddle, basket, market)
        put = to_put(straddle, basket, market)
        assert call - put == pytest.approx(basket.forward_value(market.forwards))
        assert to_straddle(QuoteSet(1, QuoteKind.CALL, call), market) == pytest.approx(straddle, abs=1e-15)
        assert to_straddle(QuoteSet(1, QuoteKind.PUT, put), market) == pytest.approx(straddle, abs=1e-15)


def test_validate_examples():
    assert validate(one_asset(quoted=[(1.0, 0.5)])) == []

    negative = validate(one_asset(quoted=[(1.0, -0.1)]))
    assert len(negative) == 1 and negative[0].kind == "structure" and negative[0].basket == 1

    below_floor = validate(one_asset(quoted=[(3.0, 1.0)], box=(4.0,)))
    assert len(below_floor) == 1
    assert below_floor[0].kind == "arbitrage"
    assert "Jensen floor" in below_floor[0].message


def test_validate_box_ceiling_and_structure():
    above = validate(one_asset(quoted=[(1.0, 2.5)]))
    assert [v.kind for v in above] == ["arbitrage"]

    outside = validate(one_asset(forward=2.5))
    assert any("outside" in v.message for v in outside)

    zero = MarketSpec(1, (1.0,), (BasketDef((0.0,), 1.0),), (), SupportKind.COMPACT, (2.0,))
    assert any("all-zero" in v.message for v in validate(zero))


def test_beta_bound_examples():
    assert beta_bound(one_asset()) == pytest.approx(3.0)

    two = MarketSpec(2, (0.5, 0.5), (BasketDef((1.0, 0.0), 0.0), BasketDef((1.0, 1.0), 1.0)), (0.5,),
                     SupportKind.COMPACT, (1.0, 1.0))
    assert beta_bound(two) == pytest.approx(4.0)

    assert beta_bound(one_asset(strike=0.0, forward=0.5, box=(1.0,))) == pytest.approx(2.0)


def test_beta_bound_needs_box():
    with pytest.raises(UnboundedSupport):
        beta_bound(one_asset(box=None))


def test_parse_market_normalizes_quotes_and_target():
    text = json.dumps({
        "n": 1,
        "forwards": [1.0],
        "baskets": [
            {"weights": [1.0], "strike": 0.8, "quote": {"kind": "call", "price": 0.3}},
            {"weights": [1.0], "strike": 1.0, "quote": None},
        ],
        "support": {"box": [2.0]},
    })
    market = parse_market(text)
    assert market.target == BasketDef((1.0,), 1.0)
    assert market.baskets[1].strike == pytest.approx(0.8)
    assert market.straddle_prices[0] == pytest.approx(2 * 0.3 - 0.2)
    assert market.is_compact
    np.testing.assert_allclose(market.box, [2.0])

    again = parse_market(json.dumps(market_to_dict(market)))
    assert again == market


def test_parse_market_errors():
    with pytest.raises(MarketFileError) as info:
        parse_market('{"n": 1,\n "forwards": [1.0,]}')
    assert info.value.line == 2

    two_targets = {"n": 1, "forwards": [1.0], "support": "unbounded",
                   "baskets": [{"weights": [1.0], "strike": 1.0, "quote": None},
                               {"weights": [1.0], "strike": 0.5, "quote": None}]}
    with pytest.raises(MarketFileError):
        parse_market(json.dumps(two_targets))

    bad_support = {"n": 1, "forwards": [1.0], "support": "box",
                   "baskets": [{"weights": [1.0], "strike": 1.0, "quote": None}]}
    with pytest.raises(MarketFileError):
        parse_market(json.dumps(bad_support))


def test_baskets_frame():
    frame = baskets_frame(one_asset(quoted=[(0.8, 0.4)]))
    assert list(frame["role"]) == ["target", "quoted"]
    assert frame.loc[1, "call"] == pytest.approx(0.3)
    assert frame.loc[1, "put"] == pytest.approx(0.1)
    assert frame["straddle"].isna().iloc[0]


def main():
    print("🧪 Testing market specification")
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
