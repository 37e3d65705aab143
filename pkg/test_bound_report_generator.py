#!/usr/bin/env python3
"""
Test script for the HTML bound report and the sweep exports
"""

import json
import os
import re
import tempfile
import zipfile

import pandas as pd

from bound_report_generator import BoundReportGenerator, convergence_figure, export_results_json, export_sweep_excel
from market_spec import BasketDef, MarketSpec, SupportKind


def sample_market():
    baskets = (BasketDef((1.0,), 1.0), BasketDef((1.0,), 0.5))
    return MarketSpec(1, (1.0,), baskets, (0.75,), SupportKind.COMPACT, (2.0,))


def sample_sweep():
    return pd.DataFrame({
        "order": [1, 2, 3],
        "lower": [0.3, 0.45, 0.5],
        "upper": [1.2, 1.05, 1.0],
        "lower_status": ["Optimal"] * 3,
        "upper_status": ["Optimal"] * 3,
        "width": [0.9, 0.6, 0.5],
    })


def sample_oracle():
    return {
        "min": 0.5, "max": 1.0, "grid_size": 201, "eps_grid": 0.005, "backend": "highs", "status": "Optimal",
        "min_support": [{"x": [0.5], "weight": 0.5}, {"x": [1.5], "weight": 0.5}],
        "max_support": [{"x": [0.0], "weight": 0.5}, {"x": [2.0], "weight": 0.5}],
    }


def test_convergence_figure():
    fig = convergence_figure(sample_sweep(), sample_oracle())
    assert [trace.name for trace in fig.data] == ["SDP upper", "SDP lower"]
    assert list(fig.data[1].y) == [0.3, 0.45, 0.5]
    assert len(fig.layout.shapes) == 2

    empty = convergence_figure(pd.DataFrame(columns=["order", "lower", "upper"]))
    assert len(empty.data) == 0


def test_html_report_sections():
    with tempfile.TemporaryDirectory() as tmp:
        generator = BoundReportGenerator(os.path.join(tmp, "html"))
        check = {"max_residual": 1e-7, "min_slack": 0.0, "tolerance": 1e-3, "samples": 1000, "passed": True}
        path = generator.generate_html_report(sample_market(), sample_sweep(), sample_oracle(), check,
                                              filename="report.html")
        assert path.endswith("report.html")
        with open(path, "r", encoding="utf-8") as f:
            html = f.read()
    for heading in ("Basket Straddle Bound Report", "Summary", "Market", "Bounds by order", "Grid oracle",
                    "Hedge certificate", "Maximizing measure"):
        assert heading in html
    assert "Replication check passed" in html
    assert re.search(r'<table[^>]*class="[^"]*\bdata-table\b', html)
    assert "plotly" in html


def test_html_report_without_oracle():
    with tempfile.TemporaryDirectory() as tmp:
        generator = BoundReportGenerator(tmp)
        path = generator.generate_html_report(sample_market(), pd.DataFrame(), filename="bare.html")
        with open(path, "r", encoding="utf-8") as f:
            html = f.read()
    assert "No relaxation was solved" in html
    assert "Grid oracle" not in html


def test_excel_export():
    with tempfile.TemporaryDirectory() as tmp:
        path = export_sweep_excel(sample_sweep(), os.path.join(tmp, "sweep.xlsx"), sample_market())
        assert path is not None
        with zipfile.ZipFile(path) as book:
            sheets = [name for name in book.namelist() if name.startswith("xl/worksheets/sheet")]
        assert len(sheets) == 2


def test_json_export():
    with tempfile.TemporaryDirectory() as tmp:
        results = {"sweep": sample_sweep().to_dict(orient="records"), "oracle": sample_oracle()}
        path = export_results_json(results, os.path.join(tmp, "results.json"))
        with open(path, "r", encoding="utf-8") as f:
            loaded = json.load(f)
    assert loaded["oracle"]["max"] == 1.0
    assert [row["order"] for row in loaded["sweep"]] == [1, 2, 3]

    assert export_results_json(results, os.path.join(tmp, "missing", "results.json")) is None


if __name__ == "__main__":
    print("🧪 Testing bound report generator")
    print("=" * 50)
    failed = 0
    for name, test in sorted(globals().items()):
        if name.startswith("test_") and callable(test):
            try:
                test()
                print(f"✅ {name}")
            except Exception as e:
                failed += 1
                print(f"❌ {name}: {e}")
    print("=" * 50)
    print("✅ All tests passed!" if not failed else f"❌ {failed} test(s) failed")
