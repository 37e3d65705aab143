#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Basket Bounds - Main Application Entry Point

Without arguments: serves the Streamlit dashboard (deployment platforms that expect app.py).
With arguments: runs the bounds CLI, e.g. `python app.py bound markets/merton.json --order 2`.
"""

import os
import subprocess
import sys

DASHBOARD = "bounds_dashboard.py"


def serve_dashboard() -> int:
    port = os.environ.get("STREAMLIT_SERVER_PORT", "8501")
    try:
        os.chdir(os.path.dirname(os.path.abspath(__file__)))
        return subprocess.run([
            sys.executable, "-m", "streamlit", "run", DASHBOARD,
            f"--server.port={port}",
            "--server.address=0.0.0.0",
            "--server.headless=true",
        ]).returncode
    except Exception as e:
        print(f"❌ Error starting dashboard: {e}", file=sys.stderr)
        return 1


def main() -> int:
    if len(sys.argv) > 1:
        from bounds_cli import main as cli_main
        return cli_main(sys.argv[1:])
    return serve_dashboard()


if __name__ == "__main__":
    sys.exit(main())
