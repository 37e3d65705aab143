#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Basket Bounds Dashboard
Interactive dashboard for market inspection, bound convergence, grid oracle and hedge certificates

Purpose: Browser front end over the relaxation pipeline
"""

import glob
import json
import os
from datetime import datetime
from typing import Optional

import pandas as pd
import plotly.graph_objects as go
import streamlit as st

from bound_errors import BasketBoundsError
from bound_report_generator import BoundReportGenerator, convergence_figure
from grid_oracle import GridSpec, jensen_floor, lp_bounds
from hedging_certificate import check_certificate, extract, positions_frame
from market_spec import MarketSpec, baskets_frame, market_to_dict, parse_market, validate
from payoff_semigroup import HierarchyMode
from relaxation_builder import LocalizerSet, RelaxationSpec, Side, SolveStatus, compute_bound, sweep_orders

MARKETS_DIR = "markets"


class BasketBoundsDashboard:
    """Streamlit dashboard for basket straddle bounds"""

    def __init__(self):
        self.setup_page_config()
        self.initialize_session_state()
        self.setup_custom_css()
        self.report_generator = BoundReportGenerator()

    def setup_page_config(self):
        st.set_page_config(
            page_title="Basket Bounds - Static Arbitrage Dashboard",
            page_icon="📐",
            layout="wide",
            initial_sidebar_state="expanded"
        )

    def setup_custom_css(self):
        st.markdown("""
        <style>
        .main-header {
            text-align: center;
            padding: 1.5rem;
            background: linear-gradient(135deg, #667eea 0%, #764ba2 50%, #f093fb 100%);
            color: white;
            border-radius: 0 0 25px 25px;
            margin-bottom: 1.5rem;
        }
        .main-header h1 { font-size: 2rem; font-weight: 800; margin: 0; }
        .main-header p { margin: 0.5rem 0 0 0; opacity: 0.9; }
        .panel-title {
            text-align: center; padding: 1rem; border-radius: 15px; color: white;
            background: linear-gradient(135deg, #667eea 0%, #764ba2 100%); margin-bottom: 1rem;
        }
        </style>
        """, unsafe_allow_html=True)

    def initialize_session_state(self):
        for key in ("market", "market_name", "sweep", "oracle", "certificate", "certificate_check"):
            if key not in st.session_state:
                st.session_state[key] = None

    def display_header(self):
        st.markdown("""
        <div class="main-header">
            <h1>📐 Basket Straddle Bounds</h1>
            <p>Certified static-arbitrage bounds from moment relaxations, with hedge certificates</p>
        </div>
        """, unsafe_allow_html=True)

    def run_dashboard(self):
        self.display_header()
        self.create_sidebar()
        self.create_main_content()

    def create_sidebar(self):
        with st.sidebar:
            st.markdown('<div class="panel-title"><h2 style="margin:0">🎛️ Control Panel</h2></div>',
                        unsafe_allow_html=True)

            st.markdown("**📁 Market**")
            uploaded = st.file_uploader("Market file", type=["json"], label_visibility="collapsed")
            samples = sorted(glob.glob(os.path.join(MARKETS_DIR, "*.json")))
            choice = st.selectbox("Sample market", ["(none)"] + [os.path.basename(p) for p in samples])

            if uploaded is not None:
                self.load_market_text(uploaded.getvalue().decode("utf-8"), uploaded.name)
            elif choice != "(none)":
                with open(os.path.join(MARKETS_DIR, choice), "r", encoding="utf-8") as f:
                    self.load_market_text(f.read(), choice)

            st.markdown("---")
            st.markdown("**⚙️ Relaxation**")
            st.session_state.orders = st.slider("Orders N", 1, 5, (1, 3))
            st.session_state.reduce = st.checkbox("Reduce straddle squares", value=True)
            st.session_state.localizers = st.radio("Localizers", [s.value for s in LocalizerSet], index=1,
                                                   horizontal=True)
            st.session_state.parity = st.checkbox("Call/put localizers", value=True)
            st.session_state.ball = st.checkbox("Ball localizer", value=True)
            st.session_state.grid = st.number_input("Oracle points per axis", 11, 2001, 201, step=10)

            st.markdown("---")
            st.markdown("### 📊 Status")
            for label, done in (("🧺 Market", st.session_state.market is not None),
                                ("📈 Bounds", st.session_state.sweep is not None),
                                ("🔎 Oracle", st.session_state.oracle is not None),
                                ("📜 Certificate", st.session_state.certificate is not None)):
                if done:
                    st.success(f"✅ {label}")
                else:
                    st.info(f"⏳ {label}")

    def load_market_text(self, text: str, name: str):
        if st.session_state.market_name == name:
            return
        try:
            st.session_state.market = parse_market(text)
            st.session_state.market_name = name
            for key in ("sweep", "oracle", "certificate", "certificate_check"):
                st.session_state[key] = None
        except BasketBoundsError as e:
            st.error(f"❌ {e}")

    @property
    def market(self) -> Optional[MarketSpec]:
        return st.session_state.market

    def relaxation_extras(self):
        return {"parity_localizers": st.session_state.parity, "ball_localizer": st.session_state.ball}

    def mode(self) -> HierarchyMode:
        return HierarchyMode.COMPACT if self.market.is_compact else HierarchyMode.UNBOUNDED

    def create_main_content(self):
        if self.market is None:
            st.info("📁 Upload a market file or pick a sample market in the sidebar")
            return
        tab1, tab2, tab3, tab4, tab5 = st.tabs([
            "🧺 Market",
            "📈 Bounds",
            "🔎 Oracle",
            "📜 Certificate",
            "📋 Reports",
        ])
        with tab1:
            self.create_market_tab()
        with tab2:
            self.create_bounds_tab()
        with tab3:
            self.create_oracle_tab()
        with tab4:
            self.create_certificate_tab()
        with tab5:
            self.create_reports_tab()

    def create_market_tab(self):
        market = self.market
        col1, col2, col3, col4 = st.columns(4)
        with col1:
            st.metric("Assets", market.n)
        with col2:
            st.metric("Quoted baskets", market.m)
        with col3:
            st.metric("Support", "box" if market.is_compact else "unbounded")
        with col4:
            st.metric("Jensen floor", f"{jensen_floor(market):.6g}")

        st.markdown("#### Baskets")
        st.dataframe(baskets_frame(market), use_container_width=True)
        st.markdown("#### Forwards")
        st.dataframe(pd.DataFrame({"asset": [f"x{i + 1}" for i in range(market.n)],
                                   "forward": list(market.forwards)}), use_container_width=True)

        violations = validate(market)
        if violations:
            for v in violations:
                st.error(f"❌ {v.message}")
        else:
            st.success("✅ No structural problem or Jensen-floor violation")

    def create_bounds_tab(self):
        low, high = st.session_state.orders
        if st.button("🚀 Solve relaxations", type="primary"):
            with st.spinner(f"Solving orders {low}..{high}"):
                try:
                    st.session_state.sweep = sweep_orders(
                        self.market, range(low, high + 1), self.mode(), st.session_state.reduce,
                        LocalizerSet(st.session_state.localizers), **self.relaxation_extras()
                    )
                except BasketBoundsError as e:
                    st.error(f"❌ {e}")

        sweep = st.session_state.sweep
        if sweep is None:
            return
        oracle = st.session_state.oracle
        st.plotly_chart(convergence_figure(sweep, oracle), use_container_width=True)
        st.dataframe(sweep, use_container_width=True)
        failed = sweep[(sweep["lower_status"] == SolveStatus.PRIMAL_INFEASIBLE.value)
                       | (sweep["upper_status"] == SolveStatus.PRIMAL_INFEASIBLE.value)]
        if not failed.empty:
            st.error(f"❌ Static arbitrage detected at order {int(failed['order'].min())}")

    def create_oracle_tab(self):
        market = self.market
        if not market.is_compact or market.n > 3:
            st.warning("⚠️ The grid oracle runs on box-supported markets with at most 3 assets")
            return
        if st.button("🔎 Run grid oracle", type="primary"):
            try:
                st.session_state.oracle = lp_bounds(market, GridSpec(int(st.session_state.grid))).to_dict()
            except BasketBoundsError as e:
                st.session_state.oracle = {"min": None, "max": None, "message": str(e)}

        oracle = st.session_state.oracle
        if not oracle:
            return
        if oracle.get("min") is None:
            st.error(f"❌ {oracle.get('message', 'grid infeasible')}")
            return
        col1, col2, col3 = st.columns(3)
        with col1:
            st.metric("Grid min", f"{oracle['min']:.8g}")
        with col2:
            st.metric("Grid max", f"{oracle['max']:.8g}")
        with col3:
            st.metric("Grid points", oracle["grid_size"])

        if market.n == 1:
            fig = go.Figure()
            for key, name, color in (("min_support", "minimizing", "#2E86AB"),
                                     ("max_support", "maximizing", "#A23B72")):
                atoms = oracle.get(key) or []
                fig.add_trace(go.Bar(x=[a["x"][0] for a in atoms], y=[a["weight"] for a in atoms],
                                     name=f"{name} measure", marker_color=color, width=0.02))
            fig.update_layout(title="Extremal grid measures", xaxis_title="x", yaxis_title="weight",
                              template="plotly_white", barmode="overlay")
            st.plotly_chart(fig, use_container_width=True)

    def create_certificate_tab(self):
        market = self.market
        if not market.is_compact:
            st.info("ℹ️ Certificates are emitted for box-supported markets only")
            return
        col1, col2 = st.columns(2)
        with col1:
            order = st.number_input("Order N", 1, 5, 2)
        with col2:
            side = Side(st.radio("Side", [s.value for s in Side], horizontal=True))

        if st.button("📜 Extract certificate", type="primary"):
            spec = RelaxationSpec(int(order), HierarchyMode.COMPACT, side, st.session_state.reduce,
                                  LocalizerSet(st.session_state.localizers), **self.relaxation_extras())
            try:
                problem, result = compute_bound(market, spec)
                if result.status != SolveStatus.OPTIMAL:
                    st.error(f"❌ Solver returned {result.status.value}")
                    return
                cert = extract(problem, result.dual)
                st.session_state.certificate = cert
                st.session_state.certificate_check = check_certificate(cert, market).to_dict()
            except BasketBoundsError as e:
                st.error(f"❌ {e}")
                return

        cert = st.session_state.certificate
        if cert is None:
            return
        check = st.session_state.certificate_check
        col1, col2, col3 = st.columns(3)
        with col1:
            st.metric(f"{cert.side.value.title()} bound", f"{cert.bound:.8g}")
        with col2:
            st.metric("Replication residual", f"{check['max_residual']:.2e}")
        with col3:
            st.metric("Minimum slack", f"{check['min_slack']:.2e}")
        if check["passed"]:
            st.success("✅ Certificate replicates the target within tolerance")
        else:
            st.error("❌ Certificate check failed")
        st.dataframe(positions_frame(cert), use_container_width=True)
        st.download_button("💾 Download certificate", json.dumps(cert.to_dict(), indent=2),
                           file_name=f"certificate_{cert.side.value}_N{cert.order}.json", mime="application/json")

    def create_reports_tab(self):
        sweep = st.session_state.sweep
        if sweep is None:
            st.info("📈 Solve the relaxations first")
            return
        if st.button("📋 Generate HTML report", type="primary"):
            path = self.report_generator.generate_html_report(
                self.market, sweep, st.session_state.oracle, st.session_state.certificate_check
            )
            st.success(f"✅ Report written to {path}")
            with open(path, "r", encoding="utf-8") as f:
                st.download_button("💾 Download HTML report", f.read(), file_name=os.path.basename(path),
                                   mime="text/html")

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        st.download_button("💾 Download sweep (CSV)", sweep.to_csv(index=False),
                           file_name=f"bound_sweep_{timestamp}.csv", mime="text/csv")
        results = {"market": market_to_dict(self.market), "bounds": sweep.to_dict(orient="records"),
                   "oracle": st.session_state.oracle, "certificate_check": st.session_state.certificate_check}
        st.download_button("💾 Download results (JSON)", json.dumps(results, indent=2, default=str),
                           file_name=f"bound_results_{timestamp}.json", mime="application/json")


def main():
    dashboard = BasketBoundsDashboard()
    dashboard.run_dashboard()


if __name__ == "__main__":
    main()
