#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
SDP Solver
Dense primal-dual interior-point method for
    min c'y  s.t.  E y = f,  S_k(y) = sum_j y_j B_kj >= 0 (PSD),  A_lp y >= 0
and its dual
    max f'lam  s.t.  c = E'lam + sum_k adj_k(Q_k) + A_lp' z,  Q_k >= 0,  z >= 0

The pair is embedded in a homogeneous self-dual system (extra variables tau, kappa), so the
iterates either converge to an optimal pair (tau > 0) or to a Farkas ray (tau -> 0) that
proves primal or dual infeasibility.

Purpose: Solve the moment relaxations and the oracle LP without an external conic package
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.optimize import linprog

from bound_errors import NumericalBreakdown, SolverFailure, StandardFormError
from bound_settings import SolverSettings, TRACE, load_solver_settings, status


class ConicStatus(Enum):
    OPTIMAL = "Optimal"
    PRIMAL_INFEASIBLE = "PrimalInfeasible"
    DUAL_INFEASIBLE = "DualInfeasible"
    INACCURATE = "Inaccurate"
    MAX_ITERATIONS = "MaxIterations"


@dataclass
class PsdBlock:
    """S(y) = sum_k y[var_ids[k]] * mats[k]"""
    name: str
    dim: int
    var_ids: np.ndarray
    mats: np.ndarray

    def apply(self, y: np.ndarray) -> np.ndarray:
        if len(self.var_ids) == 0:
            return np.zeros((self.dim, self.dim))
        return np.tensordot(y[self.var_ids], self.mats, axes=1)

    def adjoint(self, Q: np.ndarray, num_vars: int) -> np.ndarray:
        out = np.zeros(num_vars)
        if len(self.var_ids):
            out[self.var_ids] = np.einsum("kij,ij->k", self.mats, Q)
        return out


def _num(value) -> str:
    return repr(float(value))


@dataclass
class StandardForm:
    """Homogeneous block form; constants enter through a variable fixed by an equality"""
    c: np.ndarray
    E: np.ndarray
    f: np.ndarray
    blocks: List[PsdBlock]
    lp_rows: np.ndarray
    equality_names: List[str] = field(default_factory=list)
    lp_names: List[str] = field(default_factory=list)
    block_map: List[Tuple[str, int]] = field(default_factory=list)
    block_names: List[str] = field(default_factory=list)
    variable_names: List[str] = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return self.c.shape[0]

    @property
    def barrier_degree(self) -> int:
        return sum(b.dim for b in self.blocks) + self.lp_rows.shape[0]

    def to_text(self) -> str:
        """Sparse text export: one record per line, upper-triangle block entries"""
        v, p = self.num_vars, self.E.shape[0]
        lines = [
            "# basket-bounds standard form",
            f"vars {v}",
            f"equalities {p}",
            f"blocks {len(self.blocks)}",
            f"lprows {self.lp_rows.shape[0]}",
        ]
        lines += [f"c {j} {_num(val)}" for j, val in enumerate(self.c) if val != 0.0]
        for r in range(p):
            lines.append(f"rhs {r} {_num(self.f[r])}")
            lines += [f"eq {r} {j} {_num(val)}" for j, val in enumerate(self.E[r]) if val != 0.0]
        for k, block in enumerate(self.blocks):
            lines.append(f"block {k} {block.dim} {block.name}")
            for var, mat in zip(block.var_ids, block.mats):
                rows, cols = np.nonzero(np.triu(mat))
                lines += [f"entry {k} {int(var)} {i} {j} {_num(mat[i, j])}" for i, j in zip(rows, cols)]
        for r, row in enumerate(self.lp_rows):
            lines += [f"lp {r} {j} {_num(val)}" for j, val in enumerate(row) if val != 0.0]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "StandardForm":
        header: Dict[str, int] = {}
        records: List[List[str]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] in ("vars", "equalities", "blocks", "lprows"):
                try:
                    header[parts[0]] = int(parts[1])
                except (IndexError, ValueError):
                    raise StandardFormError(f"bad {parts[0]} header", lineno, 1)
            elif parts[0] in ("c", "rhs", "eq", "block", "entry", "lp"):
                records.append(parts + [str(lineno)])
            else:
                raise StandardFormError(f"unknown record {parts[0]!r}", lineno, 1)
        lineno = 0
        try:
            v, p = header["vars"], header["equalities"]
            c, E, f = np.zeros(v), np.zeros((p, v)), np.zeros(p)
            lp = np.zeros((header.get("lprows", 0), v))
            dims, names, entries = {}, {}, {}
            for rec in records:
                kind, lineno = rec[0], int(rec[-1])
                if kind == "c":
                    c[int(rec[1])] = float(rec[2])
                elif kind == "rhs":
                    f[int(rec[1])] = float(rec[2])
                elif kind == "eq":
                    E[int(rec[1]), int(rec[2])] = float(rec[3])
                elif kind == "block":
                    dims[int(rec[1])], names[int(rec[1])] = int(rec[2]), " ".join(rec[3:-1])
                elif kind == "entry":
                    k, var, i, j, val = int(rec[1]), int(rec[2]), int(rec[3]), int(rec[4]), float(rec[5])
                    mat = entries.setdefault(k, {}).setdefault(var, np.zeros((dims[k], dims[k])))
                    mat[i, j] = val
                    mat[j, i] = val
                elif kind == "lp":
                    lp[int(rec[1]), int(rec[2])] = float(rec[3])
        except KeyError as e:
            raise StandardFormError(f"missing header or block {e}", lineno or None, 1 if lineno else None)
        except (IndexError, ValueError) as e:
            raise StandardFormError(f"malformed record: {e}", lineno or None, 1 if lineno else None)
        blocks = []
        for k in sorted(dims):
            stack = entries.get(k, {})
            ids = np.array(sorted(stack), dtype=int)
            mats = np.array([stack[var] for var in ids]) if len(ids) else np.zeros((0, dims[k], dims[k]))
            blocks.append(PsdBlock(names[k], dims[k], ids, mats))
        return cls(c, E, f, blocks, lp)


@dataclass
class ConicSolution:
    """Primal y with slacks, dual multipliers, status and relative residuals

    On PrimalInfeasible, lam/Q/lp_dual hold the Farkas ray scaled to f'lam = 1 and y is None;
    on DualInfeasible, y holds the improving ray scaled to c'y = -1 and lam is None.
    """
    status: ConicStatus
    y: Optional[np.ndarray]
    lam: Optional[np.ndarray]
    Q: List[np.ndarray]
    S: List[np.ndarray]
    lp_dual: np.ndarray
    lp_slack: np.ndarray
    residuals: Dict[str, float] = field(default_factory=dict)
    iterations: int = 0
    primal_objective: Optional[float] = None
    dual_objective: Optional[float] = None
    block_duals: Optional[List[np.ndarray]] = None
    block_slacks: Optional[List[np.ndarray]] = None

    @property
    def is_optimal(self) -> bool:
        return self.status == ConicStatus.OPTIMAL


class ConicBackend(ABC):
    """Anything that solves a StandardForm"""

    name = "backend"

    @abstractmethod
    def solve(self, sf: StandardForm, settings: SolverSettings) -> ConicSolution:
        ...


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def _max_step_psd(X: np.ndarray, dX: np.ndarray) -> float:
    """Largest a with X + a dX PSD (inf when dX keeps X PSD for all a)"""
    try:
        L = linalg.cholesky(X, lower=True)
        A = linalg.solve_triangular(L, dX, lower=True)
        M = linalg.solve_triangular(L, A.T, lower=True)
        lowest = linalg.eigvalsh(_sym(M))[0]
    except (linalg.LinAlgError, ValueError):
        return 0.0
    return math.inf if lowest >= 0 else -1.0 / lowest


def _max_step_lp(x: np.ndarray, dx: np.ndarray) -> float:
    neg = dx < 0
    if not np.any(neg):
        return math.inf
    return float(np.min(-x[neg] / dx[neg]))


class NewtonSystem:
    """LU of the quasi-definite matrix [[H + dI, E'], [E, -dI]]; solves are refined against d = 0"""

    def __init__(self, H: np.ndarray, E: np.ndarray, delta: float, refinement_steps: int = 3):
        self.v, p = H.shape[0], E.shape[0]
        self.exact = np.block([[H, E.T], [E, np.zeros((p, p))]]) if p else H
        shift = np.concatenate([np.full(self.v, delta), np.full(p, -delta)])
        regularized = self.exact + np.diag(shift)
        if not np.all(np.isfinite(regularized)):
            raise NumericalBreakdown("Newton system has non-finite entries")
        self.factor = linalg.lu_factor(regularized, check_finite=False)
        if np.min(np.abs(np.diag(self.factor[0])), initial=math.inf) == 0.0:
            raise NumericalBreakdown("Newton system singular after regularization")
        self.refinement_steps = refinement_steps

    def solve(self, top: np.ndarray, bottom: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """[a; b] with H a + E'b = top, E a = bottom"""
        rhs = np.concatenate([top, bottom])
        x = linalg.lu_solve(self.factor, rhs, check_finite=False)
        res = rhs - self.exact @ x
        best = np.linalg.norm(res)
        floor = 1e-15 * (1.0 + np.linalg.norm(rhs))
        for _ in range(self.refinement_steps):
            if best <= floor:
                break
            trial = x + linalg.lu_solve(self.factor, res, check_finite=False)
            trial_res = rhs - self.exact @ trial
            trial_norm = np.linalg.norm(trial_res)
            if not trial_norm < best:
                break
            x, res, best = trial, trial_res, trial_norm
        return x[:self.v], x[self.v:]


@dataclass
class _Direction:
    dy: np.ndarray
    dlam: np.ndarray
    dS: List[np.ndarray]
    dQ: List[np.ndarray]
    ds: np.ndarray
    dz: np.ndarray
    dtau: float
    dkappa: float


class InteriorPointBackend(ConicBackend):
    """Homogeneous self-dual embedding, HKM direction, Mehrotra predictor-corrector, dense linear algebra"""

    name = "ipm"

    def solve(self, sf: StandardForm, settings: SolverSettings) -> ConicSolution:
        v, p = sf.num_vars, sf.E.shape[0]
        c, E, f, A = sf.c, sf.E, sf.f, sf.lp_rows
        blocks = sf.blocks
        scale_c, scale_f = max(1.0, np.linalg.norm(c)), max(1.0, np.linalg.norm(f))

        if p:
            y0, *_ = np.linalg.lstsq(E, f, rcond=None)
            mismatch = f - E @ y0
            if np.linalg.norm(mismatch) > settings.infeasibility_tol * scale_f:
                status("⚠️ Equality constraints are inconsistent", TRACE)
                ray = mismatch / float(f @ mismatch)
                return self._certificate(sf, ConicStatus.PRIMAL_INFEASIBLE, y=None, lam=ray,
                                         residuals={"equality_mismatch": float(np.linalg.norm(mismatch))})

        nu = sf.barrier_degree
        if nu == 0:
            y0 = np.linalg.lstsq(E, f, rcond=None)[0] if p else np.zeros(v)
            return self._linear_only(sf, y0, settings)

        y, lam = np.zeros(v), np.zeros(p)
        S = [np.eye(b.dim) for b in blocks]
        Q = [np.eye(b.dim) for b in blocks]
        s, z = np.ones(A.shape[0]), np.ones(A.shape[0])
        tau, kappa = 1.0, 1.0

        status(f"{'it':>3} {'pobj':>14} {'dobj':>14} {'pinf':>9} {'dinf':>9} {'gap':>9} {'tau/kap':>9} "
               f"{'step':>6}", TRACE)
        residuals: Dict[str, float] = {}
        outcome = ConicStatus.MAX_ITERATIONS
        stalled = 0
        iteration = 0
        for iteration in range(settings.max_iter):
            MS = [b.apply(y) for b in blocks]
            R = [Mk - Sk for Mk, Sk in zip(MS, S)]
            r_p = f * tau - E @ y
            r_l = A @ y - s
            K = E.T @ lam + A.T @ z
            for b, Qk in zip(blocks, Q):
                K = K + b.adjoint(Qk, v)
            r_d = c * tau - K
            cy, fl = float(c @ y), float(f @ lam)
            r_g = fl - cy - kappa
            comp = sum(float(np.sum(Sk * Qk)) for Sk, Qk in zip(S, Q)) + float(s @ z)
            mu = (comp + tau * kappa) / (nu + 1)

            pobj, dobj = cy / tau, fl / tau
            cone_res = sum(np.linalg.norm(Rk) for Rk in R) + np.linalg.norm(r_l)
            pinf = (np.linalg.norm(r_p) + cone_res) / (tau * scale_f)
            dinf = np.linalg.norm(r_d) / (tau * scale_c)
            gap = max(abs(pobj - dobj), comp / tau ** 2) / (1.0 + abs(pobj) + abs(dobj))
            residuals = {"primal_eq": float(pinf), "dual": float(dinf), "gap": float(gap), "mu": float(mu),
                         "tau": float(tau), "kappa": float(kappa)}

            if pinf <= settings.tol and dinf <= settings.tol and gap <= settings.tol:
                outcome = ConicStatus.OPTIMAL
                break
            if fl > 0 and np.linalg.norm(K) / (scale_c * fl) <= settings.infeasibility_tol:
                residuals["farkas"] = float(np.linalg.norm(K) / (scale_c * fl))
                outcome = ConicStatus.PRIMAL_INFEASIBLE
                break
            if cy < 0 and max(np.linalg.norm(E @ y), cone_res) / (scale_f * -cy) <= settings.infeasibility_tol:
                residuals["ray"] = float(max(np.linalg.norm(E @ y), cone_res) / (scale_f * -cy))
                outcome = ConicStatus.DUAL_INFEASIBLE
                break

            try:
                Sinv = [linalg.cho_solve(linalg.cho_factor(Sk, lower=True), np.eye(Sk.shape[0])) for Sk in S]
            except linalg.LinAlgError:
                outcome = ConicStatus.INACCURATE
                break

            d_lp = z / s
            H = A.T @ (d_lp[:, None] * A)
            for b, Sk_inv, Qk in zip(blocks, Sinv, Q):
                if len(b.var_ids) == 0:
                    continue
                Hk = np.einsum("aij,bij->ab", b.mats, Sk_inv @ b.mats @ Qk)
                H[np.ix_(b.var_ids, b.var_ids)] += _sym(Hk)
            newton = NewtonSystem(H, E, settings.regularization)
            w_y, w_l = newton.solve(-c, f)
            w_gap = -float(f @ w_l) - float(c @ w_y)

            def direction(target: float, eta: float, corrector: Optional[_Direction] = None) -> _Direction:
                T, g = [], np.zeros(v)
                for k, (b, Sk_inv, Qk, Rk) in enumerate(zip(blocks, Sinv, Q, R)):
                    Tk = target * Sk_inv - Qk - eta * _sym(Sk_inv @ Rk @ Qk)
                    if corrector is not None:
                        Tk = Tk - _sym(Sk_inv @ corrector.dS[k] @ corrector.dQ[k])
                    T.append(Tk)
                    g += b.adjoint(Tk, v)
                T_l = target / s - z - eta * d_lp * r_l
                tk_rhs = target - tau * kappa
                if corrector is not None:
                    T_l = T_l - corrector.ds * corrector.dz / s
                    tk_rhs -= corrector.dtau * corrector.dkappa
                g += A.T @ T_l
                u_y, u_l = newton.solve(g - eta * r_d, eta * r_p)
                dtau = ((-eta * r_g + float(f @ u_l) + float(c @ u_y) + tk_rhs / tau)
                        / max(w_gap + kappa / tau, 1e-300))
                dy = u_y + dtau * w_y
                dlam = -(u_l + dtau * w_l)
                dS, dQ = [], []
                for b, Sk_inv, Qk, Rk, Tk in zip(blocks, Sinv, Q, R, T):
                    Ady = b.apply(dy)
                    dS.append(Ady + eta * Rk)
                    dQ.append(Tk - _sym(Sk_inv @ Ady @ Qk))
                Ady_l = A @ dy
                return _Direction(dy, dlam, dS, dQ, Ady_l + eta * r_l, T_l - d_lp * Ady_l,
                                  dtau, (tk_rhs - kappa * dtau) / tau)

            def max_step(d: _Direction) -> float:
                steps = [_max_step_psd(Sk, dSk) for Sk, dSk in zip(S, d.dS)]
                steps += [_max_step_psd(Qk, dQk) for Qk, dQk in zip(Q, d.dQ)]
                steps += [_max_step_lp(s, d.ds), _max_step_lp(z, d.dz),
                          _max_step_lp(np.array([tau, kappa]), np.array([d.dtau, d.dkappa])), math.inf]
                return min(steps)

            affine = direction(0.0, 1.0)
            a_aff = min(1.0, max_step(affine))
            mu_aff = (sum(float(np.sum((Sk + a_aff * dSk) * (Qk + a_aff * dQk)))
                          for Sk, dSk, Qk, dQk in zip(S, affine.dS, Q, affine.dQ))
                      + float((s + a_aff * affine.ds) @ (z + a_aff * affine.dz))
                      + (tau + a_aff * affine.dtau) * (kappa + a_aff * affine.dkappa)) / (nu + 1)
            sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3 if mu > 0 else 0.0

            step = direction(sigma * mu, 1.0 - sigma, affine)
            alpha = min(1.0, settings.step_fraction * max_step(step))

            status(f"{iteration:>3} {pobj:>14.6e} {dobj:>14.6e} {pinf:>9.2e} {dinf:>9.2e} {gap:>9.2e} "
                   f"{tau / kappa:>9.2e} {alpha:>6.3f}", TRACE)

            y = y + alpha * step.dy
            lam = lam + alpha * step.dlam
            S = [_sym(Sk + alpha * dSk) for Sk, dSk in zip(S, step.dS)]
            Q = [_sym(Qk + alpha * dQk) for Qk, dQk in zip(Q, step.dQ)]
            s = s + alpha * step.ds
            z = z + alpha * step.dz
            tau = tau + alpha * step.dtau
            kappa = kappa + alpha * step.dkappa

            stalled = stalled + 1 if alpha < 1e-8 else 0
            if stalled >= 3 or tau <= 0.0 or kappa <= 0.0:
                outcome = ConicStatus.INACCURATE
                break

        solution = self._unscale(sf, outcome, y, lam, Q, z, tau, residuals)
        solution.iterations = iteration + 1
        status(f"📊 Solver finished: {outcome.value} after {solution.iterations} iterations", TRACE)
        return solution

    @staticmethod
    def _unscale(sf: StandardForm, outcome: ConicStatus, y, lam, Q, z, tau, residuals) -> ConicSolution:
        """Divide the embedding out: by tau for solutions, by the ray's objective for certificates"""
        blocks, A = sf.blocks, sf.lp_rows
        if outcome == ConicStatus.PRIMAL_INFEASIBLE:
            scale = float(sf.f @ lam)
            y_out, lam_out = None, lam / scale
        elif outcome == ConicStatus.DUAL_INFEASIBLE:
            scale = float(-(sf.c @ y))
            y_out, lam_out = y / scale, None
        else:
            scale = tau
            y_out, lam_out = y / scale, lam / scale
        Q_out = [Qk / scale for Qk in Q]
        z_out = z / scale
        S_out = [b.apply(y_out) for b in blocks] if y_out is not None else [np.zeros((b.dim, b.dim))
                                                                            for b in blocks]
        return ConicSolution(
            status=outcome,
            y=y_out,
            lam=lam_out,
            Q=Q_out,
            S=S_out,
            lp_dual=z_out,
            lp_slack=A @ y_out if y_out is not None else np.zeros(A.shape[0]),
            residuals=residuals,
            primal_objective=None if y_out is None else float(sf.c @ y_out),
            dual_objective=None if lam_out is None else float(sf.f @ lam_out),
        )

    def _linear_only(self, sf: StandardForm, y: np.ndarray, settings: SolverSettings) -> ConicSolution:
        """No cones: optimal iff c lies in the row space of E"""
        lam = np.zeros(sf.E.shape[0])
        if sf.E.shape[0]:
            lam, *_ = np.linalg.lstsq(sf.E.T, sf.c, rcond=None)
        r_d = sf.c - sf.E.T @ lam
        ok = np.linalg.norm(r_d) <= settings.tol * (1.0 + np.linalg.norm(sf.c))
        outcome = ConicStatus.OPTIMAL if ok else ConicStatus.DUAL_INFEASIBLE
        return self._certificate(sf, outcome, y=y, lam=lam, residuals={"dual": float(np.linalg.norm(r_d))})

    @staticmethod
    def _certificate(sf: StandardForm, outcome: ConicStatus, y, lam, residuals) -> ConicSolution:
        return ConicSolution(
            status=outcome, y=y, lam=lam,
            Q=[np.zeros((b.dim, b.dim)) for b in sf.blocks],
            S=[np.zeros((b.dim, b.dim)) for b in sf.blocks],
            lp_dual=np.zeros(sf.lp_rows.shape[0]), lp_slack=np.zeros(sf.lp_rows.shape[0]),
            residuals=residuals,
            primal_objective=None if y is None else float(sf.c @ y),
            dual_objective=None if lam is None else float(sf.f @ lam),
        )


class HighsLPBackend(ConicBackend):
    """Pure-LP forms through scipy's HiGHS; refuses forms with PSD blocks"""

    name = "highs"

    def solve(self, sf: StandardForm, settings: SolverSettings) -> ConicSolution:
        if sf.blocks:
            raise SolverFailure("HiGHS backend handles LP forms only", {"psd_blocks": len(sf.blocks)})
        A = sf.lp_rows
        res = linprog(
            c=sf.c,
            A_ub=-A if A.shape[0] else None,
            b_ub=np.zeros(A.shape[0]) if A.shape[0] else None,
            A_eq=sf.E if sf.E.shape[0] else None,
            b_eq=sf.f if sf.E.shape[0] else None,
            bounds=[(None, None)] * sf.num_vars,
            method="highs",
        )
        outcome = {0: ConicStatus.OPTIMAL, 2: ConicStatus.PRIMAL_INFEASIBLE,
                   3: ConicStatus.DUAL_INFEASIBLE}.get(res.status, ConicStatus.INACCURATE)
        if outcome != ConicStatus.OPTIMAL:
            status(f"⚠️ HiGHS: {res.message}", TRACE)
            return InteriorPointBackend._certificate(sf, outcome, y=None, lam=None,
                                                     residuals={"highs_status": float(res.status)})
        lam = np.asarray(res.eqlin.marginals) if sf.E.shape[0] else np.zeros(0)
        z = -np.asarray(res.ineqlin.marginals) if A.shape[0] else np.zeros(0)
        y = np.asarray(res.x)
        return ConicSolution(
            status=outcome, y=y, lam=lam, Q=[], S=[], lp_dual=z, lp_slack=A @ y,
            residuals={"primal_eq": 0.0, "dual": 0.0, "gap": 0.0}, iterations=int(res.nit),
            primal_objective=float(res.fun), dual_objective=float(sf.f @ lam) if len(lam) else 0.0,
        )


BACKENDS = {"ipm": InteriorPointBackend, "highs": HighsLPBackend}


def get_backend(name: str) -> ConicBackend:
    try:
        return BACKENDS[name]()
    except KeyError:
        raise SolverFailure(f"unknown solver backend {name!r}", {"available": sorted(BACKENDS)})


def canonicalize(problem) -> StandardForm:
    """ConicProblem -> StandardForm; 1x1 blocks become LP rows, the map keeps block order"""
    v = problem.num_vars
    c = problem.objective.dense(v)
    E = np.array([row.form.dense(v) for row in problem.equalities]).reshape(len(problem.equalities), v)
    f = np.array([row.rhs for row in problem.equalities], dtype=float)
    blocks, lp_rows, lp_names, block_map = [], [], [], []
    for block in problem.psd_blocks:
        if block.dim == 1:
            block_map.append(("lp", len(lp_rows)))
            lp_rows.append(block.entries[0][0].dense(v))
            lp_names.append(block.name)
        else:
            ids, mats = block.coefficient_stack()
            block_map.append(("psd", len(blocks)))
            blocks.append(PsdBlock(block.name, block.dim, ids, mats))
    return StandardForm(
        c=c, E=E, f=f, blocks=blocks,
        lp_rows=np.array(lp_rows).reshape(len(lp_rows), v),
        equality_names=[row.name for row in problem.equalities],
        lp_names=lp_names,
        block_map=block_map,
        block_names=[block.name for block in problem.psd_blocks],
        variable_names=[mono.label() for mono in problem.index.monomials],
    )


def decanonicalize(sf: StandardForm, solution: ConicSolution) -> ConicSolution:
    """Attach one dual and one slack matrix per named block, in the problem's block order"""
    if not sf.block_map:
        return solution
    duals, slacks = [], []
    for kind, k in sf.block_map:
        if kind == "psd":
            duals.append(solution.Q[k] if k < len(solution.Q) else np.zeros((sf.blocks[k].dim,) * 2))
            slacks.append(solution.S[k] if k < len(solution.S) else np.zeros((sf.blocks[k].dim,) * 2))
        else:
            z = solution.lp_dual[k] if k < len(solution.lp_dual) else 0.0
            sl = solution.lp_slack[k] if k < len(solution.lp_slack) else 0.0
            duals.append(np.array([[z]]))
            slacks.append(np.array([[sl]]))
    return replace(solution, block_duals=duals, block_slacks=slacks)


def solve(sf: StandardForm, tol: Optional[float] = None, max_iter: Optional[int] = None,
          backend: Optional[ConicBackend] = None) -> ConicSolution:
    settings = load_solver_settings().with_overrides(tol=tol, max_iter=max_iter)
    if settings.tol <= 0:
        raise SolverFailure("tolerance must be positive", {"tol": settings.tol})
    return (backend or InteriorPointBackend()).solve(sf, settings)


def farkas_residual(sf: StandardForm, solution: ConicSolution) -> float:
    """||E'lam + sum adj(Q) + A'z|| of a primal infeasibility ray with f'lam = 1"""
    K = sf.E.T @ solution.lam + sf.lp_rows.T @ solution.lp_dual
    for block, Qk in zip(sf.blocks, solution.Q):
        K = K + block.adjoint(Qk, sf.num_vars)
    return float(np.linalg.norm(K))


def complementarity(solution: ConicSolution) -> List[float]:
    """<S_k, Q_k> per PSD block and s_i z_i per LP row"""
    values = [float(np.sum(Sk * Qk)) for Sk, Qk in zip(solution.S, solution.Q)]
    values += [float(v) for v in solution.lp_slack * solution.lp_dual]
    return values


def main():
    """Solve min y2 s.t. y1 = 1, [[y1, y2], [y2, y1]] PSD"""
    mats = np.array([np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])])
    sf = StandardForm(
        c=np.array([0.0, 1.0]), E=np.array([[1.0, 0.0]]), f=np.array([1.0]),
        blocks=[PsdBlock("toeplitz", 2, np.array([0, 1]), mats)], lp_rows=np.zeros((0, 2)),
    )
    result = solve(sf)
    print(f"✅ {result.status.value}: y = {result.y}, objective {result.primal_objective:.10f}")


if __name__ == "__main__":
    main()
