#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Basket Bounds CLI
Command-line frontend: bound, hedge, check and oracle commands over a JSON market file

Exit codes: 0 success, 1 error, 2 static arbitrage detected
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from bound_errors import (BasketBoundsError, GridInfeasible, MarketValidationError, NegativeResult,
                          SolverFailure)
from bound_settings import QUIET, TRACE, load_solver_settings, set_verbosity, status
from grid_oracle import GridSpec, jensen_floor, lp_bounds
from hedging_certificate import check_certificate, extract, load_certificate, save_certificate
from market_spec import MarketSpec, load_market, validate
from moment_matrices import dump_blocks
from payoff_semigroup import HierarchyMode
from relaxation_builder import LocalizerSet, RelaxationSpec, Side, SolveStatus, assemble, solve_bound

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ARBITRAGE = 2

COMMANDS = ("bound", "hedge", "oracle", "check")


@dataclass
class RunConfig:
    """One CLI invocation"""
    command: str
    market_path: str
    order: int = 2
    side: Side = Side.LOWER
    mode: HierarchyMode = HierarchyMode.COMPACT
    reduce: bool = True
    localizer_set: LocalizerSet = LocalizerSet.FULL
    parity_localizers: bool = True
    ball_localizer: bool = True
    beta_override: Optional[float] = None
    grid_points: int = 201
    tol: Optional[float] = None
    max_iter: Optional[int] = None
    seed: int = 0
    samples: int = 10000
    output_path: Optional[str] = None
    certificate_path: Optional[str] = None
    backend: str = "highs"
    dump_index: bool = False
    export_path: Optional[str] = None

    def check_consistency(self) -> List[str]:
        problems = []
        if self.command not in COMMANDS:
            problems.append(f"unknown command {self.command!r}")
        if self.command == "check" and not self.certificate_path:
            problems.append("check needs --certificate")
        if self.command != "oracle" and self.order < 1:
            problems.append("--order must be >= 1")
        if self.command == "oracle" and self.mode == HierarchyMode.UNBOUNDED:
            problems.append("oracle runs on compact markets only")
        if self.command == "hedge" and self.mode == HierarchyMode.UNBOUNDED:
            status("⚠️ Unbounded mode emits bounds without certificates")
        return problems

    def relaxation(self) -> RelaxationSpec:
        return RelaxationSpec(
            order=self.order,
            mode=self.mode,
            side=self.side,
            reduce=self.reduce,
            localizer_set=self.localizer_set,
            parity_localizers=self.parity_localizers,
            ball_localizer=self.ball_localizer,
            beta_override=self.beta_override,
        )


def _round_floats(value: Any) -> Any:
    if isinstance(value, float):
        return float(f"{value:.12g}") if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    if hasattr(value, "item"):
        return _round_floats(value.item())
    return value


def format_report(report: Dict[str, Any]) -> str:
    """One JSON object per line, keys sorted, floats at 12 significant digits"""
    return json.dumps(_round_floats(report), sort_keys=True)


def _load_checked_market(path: str) -> Tuple[MarketSpec, List[Dict[str, Any]]]:
    market = load_market(path)
    violations = validate(market)
    structural = [v for v in violations if v.kind == "structure"]
    if structural:
        raise MarketValidationError(f"{len(structural)} structural violation(s) in {path}",
                                    [v.to_dict() for v in structural])
    for v in violations:
        status(f"⚠️ {v.message}")
    return market, [v.to_dict() for v in violations]


def _run_bound(config: RunConfig, market: MarketSpec, report: Dict[str, Any]) -> int:
    spec = config.relaxation()
    settings = load_solver_settings().with_overrides(tol=config.tol, max_iter=config.max_iter)
    problem = assemble(market, spec)
    if config.dump_index:
        status(problem.index.dump(), QUIET)
        status(dump_blocks(problem.psd_blocks, problem.index), TRACE)
    if config.export_path:
        from sdp_solver import canonicalize
        with open(config.export_path, "w", encoding="utf-8") as f:
            f.write(canonicalize(problem).to_text())
        status(f"💾 Standard form written to {config.export_path}")

    result = solve_bound(problem, settings=settings)
    report.update(result.to_dict())
    report["jensen_floor"] = jensen_floor(market)
    if result.arbitrage_detected:
        findings = [v.message for v in validate(market) if v.kind == "arbitrage"]
        report["message"] = "; ".join([f"static arbitrage detected at order {spec.order}"] + findings)
        return EXIT_ARBITRAGE
    if result.status != SolveStatus.OPTIMAL:
        report["error"] = f"solver returned {result.status.value}; no certified bound"
        return EXIT_ERROR

    if config.command == "hedge":
        if spec.mode == HierarchyMode.UNBOUNDED:
            report["certificate"] = None
            return EXIT_OK
        cert = extract(problem, result.dual, settings)
        check = check_certificate(cert, market, config.samples, config.seed)
        report["certificate_bound"] = cert.bound
        report["certificate_check"] = check.to_dict()
        if config.certificate_path:
            save_certificate(cert, config.certificate_path)
            report["certificate"] = config.certificate_path
        else:
            report["certificate"] = cert.to_dict()
    return EXIT_OK


def _run_check(config: RunConfig, market: MarketSpec, report: Dict[str, Any]) -> int:
    cert = load_certificate(config.certificate_path, market)
    check = check_certificate(cert, market, config.samples, config.seed)
    report.update(check.to_dict())
    report["side"] = cert.side.value
    report["bound"] = cert.bound
    if not check.passed:
        report["error"] = "certificate does not replicate the target within tolerance"
        return EXIT_ERROR
    return EXIT_OK


def _run_oracle(config: RunConfig, market: MarketSpec, report: Dict[str, Any]) -> int:
    settings = load_solver_settings().with_overrides(tol=config.tol, max_iter=config.max_iter)
    grid = GridSpec(config.grid_points, beta_override=config.beta_override)
    try:
        result = lp_bounds(market, grid, config.backend, settings)
    except GridInfeasible as e:
        report.update({"status": "Infeasible", "grid_size": e.grid_size, "message": str(e)})
        return EXIT_ARBITRAGE
    report.update(result.to_dict())
    return EXIT_OK


def run(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Execute one command; returns the exit code and the report"""
    report: Dict[str, Any] = {"command": config.command}
    problems = config.check_consistency()
    if problems:
        report["error"] = "; ".join(problems)
        return EXIT_ERROR, report
    try:
        market, violations = _load_checked_market(config.market_path)
        report["violations"] = violations
        handler = {"bound": _run_bound, "hedge": _run_bound, "check": _run_check, "oracle": _run_oracle}
        code = handler[config.command](config, market, report)
        if code == EXIT_OK and violations and config.command in ("bound", "hedge"):
            report["message"] = "; ".join(v["message"] for v in violations)
            code = EXIT_ARBITRAGE
    except NegativeResult as e:
        status(f"❌ {e}")
        report.update({"status": "PrimalInfeasible", "message": str(e)})
        code = EXIT_ARBITRAGE
    except MarketValidationError as e:
        status(f"❌ {e}")
        report.update({"error": str(e), "violations": e.violations})
        code = EXIT_ERROR
    except SolverFailure as e:
        status(f"❌ {e}")
        report.update({"error": str(e), "solver_residuals": e.residuals})
        code = EXIT_ERROR
    except BasketBoundsError as e:
        status(f"❌ {e}")
        report["error"] = str(e)
        code = EXIT_ERROR

    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as f:
            f.write(format_report(report) + "\n")
    return code, report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="basket-bounds",
        description="Certified static-arbitrage bounds for basket straddles and calls",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("market", help="market file (JSON, see FILE_FORMATS.md)")
    parser.add_argument("--order", "-N", type=int, default=2, help="relaxation order N")
    parser.add_argument("--side", choices=[s.value for s in Side], default="lower")
    parser.add_argument("--mode", choices=[m.value for m in HierarchyMode], default=None,
                        help="hierarchy; defaults to the market's support kind")
    parser.add_argument("--reduce-squares", choices=["on", "off"], default="on")
    parser.add_argument("--localizers", choices=LocalizerSet.choices(), default="full",
                        help="minimal (alias paper): coordinate localizers only; full: every generator")
    parser.add_argument("--no-parity-localizers", action="store_true",
                        help="drop the call/put positivity localizers")
    parser.add_argument("--no-ball", action="store_true", help="drop the ball localizer (compact mode)")
    parser.add_argument("--beta", type=float, default=None, help="override the compactness radius")
    parser.add_argument("--grid", type=int, default=201, help="oracle grid points per axis")
    parser.add_argument("--backend", choices=["highs", "ipm"], default="highs", help="oracle LP backend")
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--max-iter", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=10000, help="certificate check sample count")
    parser.add_argument("--certificate", default=None, help="certificate file to write (hedge) or read (check)")
    parser.add_argument("--output", "-o", default=None, help="also write the report to this file")
    parser.add_argument("--dump-index", action="store_true", help="print the moment index to stderr")
    parser.add_argument("--export-sdp", default=None, help="write the standard form to this file")
    parser.add_argument("--verbose", "-v", action="store_true", help="solver iteration log")
    parser.add_argument("--quiet", "-q", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    mode = HierarchyMode(args.mode) if args.mode else None
    if mode is None:
        try:
            mode = HierarchyMode.COMPACT if load_market(args.market).is_compact else HierarchyMode.UNBOUNDED
        except BasketBoundsError:
            mode = HierarchyMode.COMPACT
    return RunConfig(
        command=args.command,
        market_path=args.market,
        order=args.order,
        side=Side(args.side),
        mode=mode,
        reduce=args.reduce_squares == "on",
        localizer_set=LocalizerSet(args.localizers),
        parity_localizers=not args.no_parity_localizers,
        ball_localizer=not args.no_ball,
        beta_override=args.beta,
        grid_points=args.grid,
        tol=args.tol,
        max_iter=args.max_iter,
        seed=args.seed,
        samples=args.samples,
        output_path=args.output,
        certificate_path=args.certificate,
        backend=args.backend,
        dump_index=args.dump_index,
        export_path=args.export_sdp,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        set_verbosity(TRACE)
    elif args.quiet:
        set_verbosity(QUIET)
    code, report = run(config_from_args(args))
    print(format_report(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
