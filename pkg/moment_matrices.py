#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Moment Matrices
Symbolic moment matrices M_d(y) and localizing matrices M_d(g y) whose entries are
sparse linear forms in the moment vector y

Purpose: Build the PSD blocks of the relaxations and instantiate them at numeric moment vectors
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from bound_errors import DimensionMismatch, IndexTooSmall
from payoff_semigroup import Monomial, MomentIndex, PayoffAlgebra, PolyElement


class LinearForm:
    """Sparse map moment position -> coefficient"""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[int, float]] = None):
        self.terms = {int(pos): float(c) for pos, c in (terms or {}).items() if c != 0.0}

    @classmethod
    def single(cls, position: int, coeff: float = 1.0) -> "LinearForm":
        return cls({position: coeff})

    def __add__(self, other: "LinearForm") -> "LinearForm":
        merged = dict(self.terms)
        for pos, c in other.terms.items():
            merged[pos] = merged.get(pos, 0.0) + c
        return LinearForm(merged)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + other.scaled(-1.0)

    def scaled(self, factor: float) -> "LinearForm":
        return LinearForm({pos: factor * c for pos, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearForm) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    @property
    def max_position(self) -> int:
        return max(self.terms, default=-1)

    @property
    def is_single_term(self) -> bool:
        return len(self.terms) == 1

    def evaluate(self, y: np.ndarray) -> float:
        return float(sum(c * y[pos] for pos, c in self.terms.items()))

    def dense(self, num_vars: int) -> np.ndarray:
        row = np.zeros(num_vars)
        for pos, c in self.terms.items():
            row[pos] = c
        return row

    def describe(self, index: Optional[MomentIndex] = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for pos, c in sorted(self.terms.items()):
            name = index.monomial(pos).label() if index is not None else str(pos)
            parts.append(f"{c:+g}*y[{name}]")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"LinearForm({self.describe()})"


@dataclass(eq=False)
class SymbolicMatrix:
    """Symmetric matrix of linear forms; row i and column i belong to basis[i]"""
    name: str
    basis: Tuple[Monomial, ...]
    entries: List[List[LinearForm]]
    localizer: Optional[PolyElement] = None
    order: int = 0
    _stack: Optional[Tuple[np.ndarray, np.ndarray]] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def max_position(self) -> int:
        return max((form.max_position for row in self.entries for form in row), default=-1)

    def is_symmetric(self) -> bool:
        return all(self.entries[i][j] == self.entries[j][i]
                   for i in range(self.dim) for j in range(i + 1, self.dim))

    def coefficient_stack(self) -> Tuple[np.ndarray, np.ndarray]:
        """(variable ids, matrices): the block equals sum_k y[ids[k]] * matrices[k]"""
        if self._stack is None:
            stack: Dict[int, np.ndarray] = {}
            for i in range(self.dim):
                for j in range(i, self.dim):
                    for pos, c in self.entries[i][j].terms.items():
                        mat = stack.setdefault(pos, np.zeros((self.dim, self.dim)))
                        mat[i, j] += c
                        if i != j:
                            mat[j, i] += c
            ids = np.array(sorted(stack), dtype=int)
            mats = np.array([stack[pos] for pos in ids]) if len(ids) else np.zeros((0, self.dim, self.dim))
            self._stack = (ids, mats)
        return self._stack

    def dump(self, index: Optional[MomentIndex] = None) -> str:
        """Upper-triangle entries as text, one per line"""
        lines = [f"# block {self.name}: {self.dim}x{self.dim}, order {self.order}"]
        for i in range(self.dim):
            for j in range(i, self.dim):
                lines.append(f"({i},{j})\t{self.entries[i][j].describe(index)}")
        return "\n".join(lines)


def _check_cap(index: MomentIndex, needed: int, what: str):
    if needed > index.degree_cap:
        raise IndexTooSmall(f"{what} needs moments up to degree {needed}, index capped at {index.degree_cap}")


def _poly_form(index: MomentIndex, poly: PolyElement) -> LinearForm:
    return LinearForm(index.coefficients(poly))


def localizing_matrix(index: MomentIndex, g: PolyElement, d: int, algebra: PayoffAlgebra,
                      name: Optional[str] = None) -> SymbolicMatrix:
    """M_d(g y): entry (i,j) = sum_a g_a y(b_i b_j a) with products in canonical form"""
    _check_cap(index, g.degree + 2 * d, "localizing matrix")
    basis = index.basis(d)
    products: Dict[Monomial, LinearForm] = {}

    def product_form(mono: Monomial) -> LinearForm:
        if mono not in products:
            form = LinearForm()
            for alpha, coeff in g.items():
                form = form + _poly_form(index, algebra.canonical(mono.times(alpha))).scaled(coeff)
            products[mono] = form
        return products[mono]

    dim = len(basis)
    entries = [[LinearForm() for _ in range(dim)] for _ in range(dim)]
    for i in range(dim):
        for j in range(i, dim):
            form = product_form(basis[i].times(basis[j]))
            entries[i][j] = form
            entries[j][i] = form
    return SymbolicMatrix(name or f"M_{d}(({g!r}) y)", basis, entries, g, d)


def moment_matrix(index: MomentIndex, d: int, algebra: PayoffAlgebra) -> SymbolicMatrix:
    """M_d(y); square reduction follows the algebra's reduce flag"""
    _check_cap(index, 2 * d, "moment matrix")
    block = localizing_matrix(index, algebra.one(), d, algebra, name=f"moment M_{d}(y)")
    block.localizer = None
    return block


def instantiate(M: SymbolicMatrix, y) -> np.ndarray:
    """Dense numeric matrix with entries sum coeff * y[pos]"""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] <= M.max_position:
        raise DimensionMismatch(f"moment vector of length {y.shape[0]} too short for block {M.name}")
    ids, mats = M.coefficient_stack()
    if len(ids) == 0:
        return np.zeros((M.dim, M.dim))
    return np.tensordot(y[ids], mats, axes=1)


def min_eigenvalue(M: SymbolicMatrix, y) -> float:
    return float(np.linalg.eigvalsh(instantiate(M, y))[0])


def dump_blocks(blocks: Sequence[SymbolicMatrix], index: Optional[MomentIndex] = None) -> str:
    return "\n".join(block.dump(index) for block in blocks)
