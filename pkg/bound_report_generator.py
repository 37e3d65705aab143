#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Bound Report Generator
Self-contained HTML reports and Excel/JSON exports of basket bound runs

Purpose: Present the market, bounds by relaxation order, the grid oracle and the certificate check
"""

import json
import os
from datetime import datetime
from typing import Any, Dict, Optional

import pandas as pd
import plotly.graph_objects as go

from market_spec import MarketSpec, baskets_frame


def convergence_figure(sweep: pd.DataFrame, oracle: Optional[Dict[str, Any]] = None,
                       title: str = "Bounds by relaxation order") -> go.Figure:
    """Lower/upper bounds against order, with the grid oracle interval as reference lines"""
    fig = go.Figure()
    if not sweep.empty:
        fig.add_trace(go.Scatter(x=sweep["order"], y=sweep["upper"], mode="lines+markers",
                                 name="SDP upper", line=dict(color="#A23B72", width=3)))
        fig.add_trace(go.Scatter(x=sweep["order"], y=sweep["lower"], mode="lines+markers",
                                 name="SDP lower", line=dict(color="#2E86AB", width=3),
                                 fill="tonexty", fillcolor="rgba(102,126,234,0.12)"))
    if oracle and oracle.get("min") is not None:
        fig.add_hline(y=oracle["min"], line_dash="dot", line_color="#4CAF50", annotation_text="grid min")
        fig.add_hline(y=oracle["max"], line_dash="dot", line_color="#FF9800", annotation_text="grid max")
    fig.update_layout(
        title=title,
        xaxis_title="order N",
        yaxis_title="target straddle price",
        xaxis=dict(dtick=1),
        template="plotly_white",
        height=420,
    )
    return fig


class BoundReportGenerator:
    """HTML report generator for bound runs"""

    def __init__(self, reports_dir: str = "reports/html_reports"):
        self.reports_dir = reports_dir
        self.ensure_directories()

    def ensure_directories(self):
        os.makedirs(self.reports_dir, exist_ok=True)

    def generate_html_report(self, market: MarketSpec, sweep: pd.DataFrame,
                             oracle: Optional[Dict[str, Any]] = None,
                             certificate_check: Optional[Dict[str, Any]] = None,
                             filename: Optional[str] = None) -> str:
        """Write the report and return its path"""
        if not filename:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            filename = f"bound_report_{timestamp}.html"
        filepath = os.path.join(self.reports_dir, filename)

        html_content = self._create_html_template(market, sweep, oracle, certificate_check)
        with open(filepath, "w", encoding="utf-8") as f:
            f.write(html_content)

        print(f"✅ HTML bound report generated: {filename}")
        return filepath

    def _create_html_template(self, market: MarketSpec, sweep: pd.DataFrame,
                              oracle: Optional[Dict[str, Any]],
                              certificate_check: Optional[Dict[str, Any]]) -> str:
        return f"""<!DOCTYPE html>
<html lang="en" dir="ltr">
<head>
    <meta charset="UTF-8">
    <meta name="viewport" content="width=device-width, initial-scale=1.0">
    <title>Basket Bound Report</title>
    <script src="https://cdn.plot.ly/plotly-2.27.0.min.js"></script>
    <style>{self._get_css_styles()}</style>
</head>
<body>
<div class="container">
    {self._create_header(market)}
    {self._create_summary(market, sweep, oracle)}
    {self._create_market_section(market)}
    {self._create_bounds_section(sweep, oracle)}
    {self._create_oracle_section(oracle)}
    {self._create_certificate_section(certificate_check)}
    {self._create_footer()}
</div>
</body>
</html>
"""

    def _get_css_styles(self) -> str:
        return """
        * { margin: 0; padding: 0; box-sizing: border-box; }
        body { font-family: 'Inter', 'Arial', sans-serif; line-height: 1.6; color: #333;
               background: linear-gradient(135deg, #f5f7fa 0%, #c3cfe2 100%); min-height: 100vh; }
        .container { max-width: 1200px; margin: 0 auto; padding: 20px; }
        .header { background: linear-gradient(135deg, #667eea 0%, #764ba2 50%, #f093fb 100%); color: white;
                  padding: 35px 20px; border-radius: 20px; margin-bottom: 30px;
                  box-shadow: 0 20px 40px rgba(0,0,0,0.1); }
        .header h1 { font-size: 2.2rem; font-weight: 800; }
        .section { background: white; margin-bottom: 30px; border-radius: 20px;
                   box-shadow: 0 10px 30px rgba(0,0,0,0.1); overflow: hidden; }
        .section-header { background: linear-gradient(135deg, #2E86AB 0%, #A23B72 100%); color: white;
                          padding: 20px 30px; font-size: 1.4rem; font-weight: 700; }
        .section-content { padding: 30px; }
        .summary-grid { display: grid; grid-template-columns: repeat(auto-fit, minmax(220px, 1fr)); gap: 20px; }
        .summary-card { background: linear-gradient(135deg, #667eea 0%, #764ba2 100%); color: white;
                        padding: 25px; border-radius: 20px; text-align: center; }
        .summary-card h3 { font-size: 1.8rem; font-weight: 800; }
        .data-table { width: 100%; border-collapse: collapse; margin: 15px 0; }
        .data-table th { background: linear-gradient(135deg, #2E86AB 0%, #A23B72 100%); color: white;
                         padding: 12px; text-align: left; }
        .data-table td { padding: 10px 12px; border-bottom: 1px solid #eee; font-family: monospace; }
        .status-ok { color: #2e7d32; font-weight: 700; }
        .status-bad { color: #c62828; font-weight: 700; }
        .footer { text-align: center; padding: 25px; color: #555; }
        """

    def _create_header(self, market: MarketSpec) -> str:
        current_time = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        support = "box " + ", ".join(f"{b:g}" for b in market.asset_upper_bounds) if market.is_compact \
            else "unbounded"
        return f"""
    <div class="header">
        <h1>📐 Basket Straddle Bound Report</h1>
        <p>{market.n} asset(s), {market.m} quoted basket(s), support {support}</p>
        <p><strong>Generated:</strong> {current_time}</p>
    </div>"""

    def _create_summary(self, market: MarketSpec, sweep: pd.DataFrame, oracle: Optional[Dict[str, Any]]) -> str:
        cards = [("Assets", str(market.n)), ("Quoted baskets", str(market.m))]
        if not sweep.empty:
            last = sweep.iloc[-1]
            cards.append((f"Lower bound (N={int(last['order'])})", _fmt(last.get("lower"))))
            cards.append((f"Upper bound (N={int(last['order'])})", _fmt(last.get("upper"))))
        if oracle and oracle.get("min") is not None:
            cards.append(("Grid interval", f"[{_fmt(oracle['min'])}, {_fmt(oracle['max'])}]"))
        card_html = "".join(f'<div class="summary-card"><h3>{value}</h3><p>{label}</p></div>'
                            for label, value in cards)
        return _section("📈", "Summary", f'<div class="summary-grid">{card_html}</div>')

    def _create_market_section(self, market: MarketSpec) -> str:
        frame = baskets_frame(market)
        forwards = ", ".join(f"x{i + 1}: {p:g}" for i, p in enumerate(market.forwards))
        body = f"<p><strong>Forwards</strong> {forwards}</p>" + _table(frame)
        return _section("🧺", "Market", body)

    def _create_bounds_section(self, sweep: pd.DataFrame, oracle: Optional[Dict[str, Any]]) -> str:
        if sweep.empty:
            return _section("📊", "Bounds by order", "<p>No relaxation was solved.</p>")
        chart = convergence_figure(sweep, oracle).to_html(full_html=False, include_plotlyjs=False)
        return _section("📊", "Bounds by order", _table(sweep) + chart)

    def _create_oracle_section(self, oracle: Optional[Dict[str, Any]]) -> str:
        if not oracle:
            return ""
        if oracle.get("min") is None:
            body = f'<p class="status-bad">❌ {oracle.get("message", "grid infeasible")}</p>'
        else:
            rows = pd.DataFrame([{"quantity": k, "value": oracle.get(k)}
                                 for k in ("min", "max", "grid_size", "eps_grid", "backend")])
            body = _table(rows)
            for key, label in (("min_support", "Minimizing measure"), ("max_support", "Maximizing measure")):
                atoms = oracle.get(key) or []
                if atoms:
                    body += f"<h4>{label}</h4>" + _table(pd.DataFrame(atoms))
        return _section("🔎", "Grid oracle", body)

    def _create_certificate_section(self, check: Optional[Dict[str, Any]]) -> str:
        if not check:
            return ""
        css = "status-ok" if check.get("passed") else "status-bad"
        icon = "✅" if check.get("passed") else "❌"
        rows = pd.DataFrame([{"quantity": k, "value": v} for k, v in check.items() if k != "passed"])
        body = f'<p class="{css}">{icon} Replication check {"passed" if check.get("passed") else "failed"}</p>'
        return _section("📜", "Hedge certificate", body + _table(rows))

    def _create_footer(self) -> str:
        return """
    <div class="footer">
        <p>Bounds are certified outer approximations; the grid interval is an inner approximation.</p>
    </div>"""


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and pd.isna(value)):
        return "n/a"
    return f"{value:.6g}" if isinstance(value, (int, float)) else str(value)


def _table(frame: pd.DataFrame) -> str:
    return frame.to_html(index=False, classes="data-table", border=0, na_rep="n/a", float_format=lambda v: f"{v:.8g}")


def _section(icon: str, title: str, body: str) -> str:
    return f"""
    <div class="section">
        <div class="section-header"><span>{icon}</span> <span>{title}</span></div>
        <div class="section-content">{body}</div>
    </div>"""


def export_sweep_excel(sweep: pd.DataFrame, filepath: Optional[str] = None,
                       market: Optional[MarketSpec] = None) -> Optional[str]:
    """Order sweep (and market table) as an Excel workbook"""
    if not filepath:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        filepath = f"bound_sweep_{timestamp}.xlsx"
    try:
        with pd.ExcelWriter(filepath, engine="xlsxwriter") as writer:
            sweep.to_excel(writer, sheet_name="bounds", index=False)
            if market is not None:
                baskets_frame(market).to_excel(writer, sheet_name="market", index=False)
        print(f"✅ Bound sweep exported to: {filepath}")
        return filepath
    except Exception as e:
        print(f"❌ Error exporting sweep: {str(e)}")
        return None


def export_results_json(results: Dict[str, Any], filepath: Optional[str] = None) -> Optional[str]:
    if not filepath:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        filepath = f"bound_results_{timestamp}.json"
    try:
        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(results, f, indent=2, ensure_ascii=False, default=str)
        print(f"✅ Results exported to: {filepath}")
        return filepath
    except Exception as e:
        print(f"❌ Error exporting results: {str(e)}")
        return None


def main():
    """Report for the one-asset market shipped in markets/"""
    from grid_oracle import GridSpec, lp_bounds
    from market_spec import load_market
    from relaxation_builder import sweep_orders

    market = load_market("markets/merton.json")
    sweep = sweep_orders(market, [1, 2, 3])
    oracle = lp_bounds(market, GridSpec(401)).to_dict()
    path = BoundReportGenerator().generate_html_report(market, sweep, oracle)
    print(f"HTML report generated: {path}")


if __name__ == "__main__":
    main()
