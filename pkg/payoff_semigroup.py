#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Payoff Semigroup
Symbolic algebra generated by the asset coordinates x_i, the basket straddles s_j and,
for unbounded support, the auxiliary weight generator t

Purpose: Canonical monomials, square reduction |u|^2 = u^2, evaluation and graded-lex moment indexing
"""

from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb

from bound_errors import DimensionMismatch, IndexTooSmall
from market_spec import MarketSpec


class HierarchyMode(Enum):
    """Which moment hierarchy the algebra serves"""
    COMPACT = "compact"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Monomial:
    """Product s^a x^b t^k of generators"""
    straddle_exponents: Tuple[int, ...]
    x_exponents: Tuple[int, ...]
    aux_exponent: int = 0

    @classmethod
    def unit(cls, n: int, m: int) -> "Monomial":
        return cls((0,) * (m + 1), (0,) * n, 0)

    @property
    def degree(self) -> int:
        return sum(self.straddle_exponents) + sum(self.x_exponents) + self.aux_exponent

    @property
    def exponents(self) -> Tuple[int, ...]:
        """Exponents in generator order s_0..s_m, x_1..x_n, t"""
        return self.straddle_exponents + self.x_exponents + (self.aux_exponent,)

    def times(self, other: "Monomial") -> "Monomial":
        """Free-monoid product (exponentwise sum)"""
        if len(self.straddle_exponents) != len(other.straddle_exponents) or \
                len(self.x_exponents) != len(other.x_exponents):
            raise DimensionMismatch("monomials come from different markets")
        return Monomial(
            tuple(a + b for a, b in zip(self.straddle_exponents, other.straddle_exponents)),
            tuple(a + b for a, b in zip(self.x_exponents, other.x_exponents)),
            self.aux_exponent + other.aux_exponent,
        )

    def label(self) -> str:
        parts = []
        for name, exps in (("s", self.straddle_exponents), ("x", self.x_exponents)):
            offset = 0 if name == "s" else 1
            for i, e in enumerate(exps):
                if e:
                    parts.append(f"{name}{i + offset}" + (f"^{e}" if e > 1 else ""))
        if self.aux_exponent:
            parts.append("t" + (f"^{self.aux_exponent}" if self.aux_exponent > 1 else ""))
        return "*".join(parts) if parts else "1"

    def to_list(self) -> list:
        return [list(self.straddle_exponents), list(self.x_exponents), self.aux_exponent]

    @classmethod
    def from_list(cls, raw: Sequence) -> "Monomial":
        return cls(tuple(int(v) for v in raw[0]), tuple(int(v) for v in raw[1]), int(raw[2]))


def grlex_key(mono: Monomial) -> Tuple[int, ...]:
    """Graded order; within a degree the generator listed first wins (s_0^2 before s_0 s_1)"""
    return (mono.degree,) + tuple(-e for e in mono.exponents)


class PolyElement:
    """Finite linear combination of monomials; zero coefficients are never stored"""

    def __init__(self, terms: Optional[Dict[Monomial, float]] = None):
        self._terms = {mono: float(c) for mono, c in (terms or {}).items() if c != 0.0}

    @classmethod
    def of(cls, mono: Monomial, coeff: float = 1.0) -> "PolyElement":
        return cls({mono: coeff})

    @property
    def terms(self) -> Dict[Monomial, float]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def degree(self) -> int:
        return max((mono.degree for mono in self._terms), default=0)

    def __add__(self, other: "PolyElement") -> "PolyElement":
        merged = dict(self._terms)
        for mono, c in other.items():
            merged[mono] = merged.get(mono, 0.0) + c
        return PolyElement(merged)

    def __neg__(self) -> "PolyElement":
        return PolyElement({mono: -c for mono, c in self._terms.items()})

    def __sub__(self, other: "PolyElement") -> "PolyElement":
        return self + (-other)

    def __mul__(self, scalar: float) -> "PolyElement":
        return PolyElement({mono: scalar * c for mono, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyElement) and self._terms == other._terms

    def almost_equal(self, other: "PolyElement", tol: float = 1e-12) -> bool:
        diff = self - other
        return all(abs(c) <= tol for _, c in diff.items())

    def sorted_items(self) -> List[Tuple[Monomial, float]]:
        return sorted(self._terms.items(), key=lambda item: grlex_key(item[0]))

    def to_list(self) -> list:
        return [[mono.to_list(), c] for mono, c in self.sorted_items()]

    @classmethod
    def from_list(cls, raw: Sequence) -> "PolyElement":
        return cls({Monomial.from_list(mono): float(c) for mono, c in raw})

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{c:g}*{mono.label()}" for mono, c in self.sorted_items())


@dataclass(eq=False)
class MomentIndex:
    """Graded-lex bijection between canonical monomials of degree <= degree_cap and positions 0..s(d)-1"""
    degree_cap: int
    monomials: Tuple[Monomial, ...]
    positions: Dict[Monomial, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.positions:
            self.positions = {mono: i for i, mono in enumerate(self.monomials)}
        self._degrees = [mono.degree for mono in self.monomials]

    @property
    def size(self) -> int:
        return len(self.monomials)

    def position(self, mono: Monomial) -> int:
        try:
            return self.positions[mono]
        except KeyError:
            raise IndexTooSmall(f"{mono.label()} (degree {mono.degree}) not in index capped at {self.degree_cap}")

    def monomial(self, position: int) -> Monomial:
        return self.monomials[position]

    def size_upto(self, d: int) -> int:
        """s(d): number of indexed monomials of degree <= d"""
        return bisect_right(self._degrees, d)

    def basis(self, d: int) -> Tuple[Monomial, ...]:
        if d > self.degree_cap:
            raise IndexTooSmall(f"basis of degree {d} requested from index capped at {self.degree_cap}")
        return self.monomials[:self.size_upto(d)]

    def contains(self, poly: PolyElement) -> bool:
        return all(mono in self.positions for mono, _ in poly.items())

    def coefficients(self, poly: PolyElement) -> Dict[int, float]:
        """Position -> coefficient map of a polynomial expressed in this index"""
        return {self.position(mono): c for mono, c in poly.items()}

    def dump(self) -> str:
        """One line per monomial: position, degree, label"""
        lines = [f"# moment index: degree cap {self.degree_cap}, s(d) = {self.size}"]
        lines += [f"{i}\t{mono.degree}\t{mono.label()}" for i, mono in enumerate(self.monomials)]
        return "\n".join(lines)


def payoff_key(weights: Sequence[float], strike: float) -> Tuple:
    """Identical straddle payoff functions share a key (|u| = |-u|)"""
    w = tuple(float(v) for v in weights)
    if strike == 0.0:
        first = next((v for v in w if v != 0.0), 0.0)
        if first < 0:
            w = tuple(-v for v in w)
    return w + (float(strike),)


class PayoffAlgebra:
    """Canonical-form arithmetic in the payoff semigroup algebra of one market"""

    def __init__(self, market: MarketSpec, mode: HierarchyMode = HierarchyMode.COMPACT, reduce: bool = True):
        self.market = market
        self.mode = mode
        self.reduce = reduce
        self.n = market.n
        self.m = market.m
        self.aliases = self._find_aliases() if reduce else tuple(range(self.m + 1))
        self._affine = [self._affine_part(j) for j in range(self.m + 1)]
        self._even_powers: Dict[Tuple[int, int], PolyElement] = {}
        self._canonical_cache: Dict[Monomial, PolyElement] = {}

    def _find_aliases(self) -> Tuple[int, ...]:
        first_seen: Dict[Tuple, int] = {}
        aliases = []
        for j, basket in enumerate(self.market.baskets):
            key = payoff_key(basket.weights, basket.strike)
            aliases.append(first_seen.setdefault(key, j))
        return tuple(aliases)

    @property
    def straddle_generators(self) -> List[int]:
        """Straddle indices that carry their own generator"""
        return [j for j in range(self.m + 1) if self.aliases[j] == j]

    @property
    def unit(self) -> Monomial:
        return Monomial.unit(self.n, self.m)

    def x(self, i: int) -> Monomial:
        exps = [0] * self.n
        exps[i] = 1
        return Monomial((0,) * (self.m + 1), tuple(exps), 0)

    def straddle(self, j: int) -> Monomial:
        exps = [0] * (self.m + 1)
        exps[self.aliases[j]] = 1
        return Monomial(tuple(exps), (0,) * self.n, 0)

    def aux(self) -> Monomial:
        return Monomial((0,) * (self.m + 1), (0,) * self.n, 1)

    def one(self) -> PolyElement:
        return PolyElement.of(self.unit)

    def _affine_part(self, j: int) -> PolyElement:
        basket = self.market.baskets[j]
        terms = {self.x(i): w for i, w in enumerate(basket.weights) if w != 0.0}
        unit = Monomial.unit(self.n, self.m)
        terms[unit] = terms.get(unit, 0.0) - basket.strike
        return PolyElement(terms)

    def affine_part(self, j: int) -> PolyElement:
        """u_j = w_j'x - K_j as a polynomial in x"""
        return self._affine[j]

    def _even_power(self, j: int, q: int) -> PolyElement:
        key = (j, q)
        if key not in self._even_powers:
            square = self._free_product(self._affine[j], self._affine[j])
            result = square if q == 1 else self._free_product(self._even_power(j, q - 1), square)
            self._even_powers[key] = result
        return self._even_powers[key]

    @staticmethod
    def _free_product(a: PolyElement, b: PolyElement) -> PolyElement:
        terms: Dict[Monomial, float] = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                mono = ma.times(mb)
                terms[mono] = terms.get(mono, 0.0) + ca * cb
        return PolyElement(terms)

    def canonical(self, mono: Monomial) -> PolyElement:
        """Canonical form: aliases merged and, with reduction on, s_j^(2q+r) -> u_j^(2q) s_j^r"""
        cached = self._canonical_cache.get(mono)
        if cached is not None:
            return cached
        if not self.reduce:
            result = PolyElement.of(mono)
        else:
            exps = list(mono.straddle_exponents)
            for j, rep in enumerate(self.aliases):
                if rep != j and exps[j]:
                    exps[rep] += exps[j]
                    exps[j] = 0
            parity = Monomial(tuple(e % 2 for e in exps), mono.x_exponents, mono.aux_exponent)
            result = PolyElement.of(parity)
            for j, e in enumerate(exps):
                if e >= 2:
                    result = self._free_product(result, self._even_power(j, e // 2))
        self._canonical_cache[mono] = result
        return result

    def multiply(self, a: Monomial, b: Monomial) -> PolyElement:
        return self.canonical(a.times(b))

    def multiply_poly(self, a: PolyElement, b: PolyElement) -> PolyElement:
        terms: Dict[Monomial, float] = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                for mono, c in self.multiply(ma, mb).items():
                    terms[mono] = terms.get(mono, 0.0) + ca * cb * c
        return PolyElement(terms)

    def canonical_poly(self, poly: PolyElement) -> PolyElement:
        result = PolyElement()
        for mono, c in poly.items():
            result = result + c * self.canonical(mono)
        return result

    def payoff_sum(self) -> PolyElement:
        """Sum of all payoffs e_k: x_1..x_n and s_0..s_m"""
        terms: Dict[Monomial, float] = {}
        for mono in [self.x(i) for i in range(self.n)] + [self.straddle(j) for j in range(self.m + 1)]:
            terms[mono] = terms.get(mono, 0.0) + 1.0
        return PolyElement(terms)

    def square_sum(self) -> PolyElement:
        """Sum of squared payoffs, in canonical form"""
        total = PolyElement()
        for mono in [self.x(i) for i in range(self.n)] + [self.straddle(j) for j in range(self.m + 1)]:
            total = total + self.multiply(mono, mono)
        return total

    def monomial_values(self, monomials: Sequence[Monomial], X) -> np.ndarray:
        """Values of each monomial at each row of X, shape (points, monomials)"""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n:
            raise DimensionMismatch(f"points have {X.shape[1]} coordinates, market has {self.n} assets")
        S = np.column_stack([basket.payoff(X) for basket in self.market.baskets])
        theta = 1.0 / (1.0 + np.sum(X ** 2, axis=1) + np.sum(S ** 2, axis=1))
        columns = np.hstack([S, X, theta[:, None]])
        powers: Dict[Tuple[int, int], np.ndarray] = {}

        def power(col: int, e: int) -> np.ndarray:
            if (col, e) not in powers:
                powers[(col, e)] = columns[:, col] ** e
            return powers[(col, e)]

        values = np.ones((X.shape[0], len(monomials)))
        for k, mono in enumerate(monomials):
            for col, e in enumerate(mono.exponents):
                if e:
                    values[:, k] *= power(col, e)
        return values

    def evaluate_many(self, poly: PolyElement, X) -> np.ndarray:
        items = list(poly.items())
        if not items:
            return np.zeros(np.atleast_2d(X).shape[0])
        monos = [mono for mono, _ in items]
        coeffs = np.array([c for _, c in items])
        return self.monomial_values(monos, X) @ coeffs

    def evaluate(self, poly: PolyElement, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.shape[0] != self.n:
            raise DimensionMismatch(f"expected a point with {self.n} coordinates")
        return float(self.evaluate_many(poly, x[None, :])[0])

    def _generator_exponent_caps(self, d: int) -> List[Tuple[str, int, int]]:
        cap = 1 if self.reduce else d
        gens = [("s", j, cap) for j in self.straddle_generators]
        gens += [("x", i, d) for i in range(self.n)]
        if self.mode == HierarchyMode.UNBOUNDED:
            gens.append(("t", 0, d))
        return gens

    def build_index(self, d: int) -> MomentIndex:
        """All canonical monomials of degree <= d in graded lexicographic order"""
        if d < 0:
            raise IndexTooSmall(f"degree cap must be >= 0, got {d}")
        gens = self._generator_exponent_caps(d)
        monomials = []

        def visit(k: int, remaining: int, chosen: List[int]):
            if k == len(gens):
                s_exps = [0] * (self.m + 1)
                x_exps = [0] * self.n
                aux = 0
                for (kind, idx, _), e in zip(gens, chosen):
                    if kind == "s":
                        s_exps[idx] = e
                    elif kind == "x":
                        x_exps[idx] = e
                    else:
                        aux = e
                monomials.append(Monomial(tuple(s_exps), tuple(x_exps), aux))
                return
            for e in range(min(gens[k][2], remaining) + 1):
                visit(k + 1, remaining - e, chosen + [e])

        visit(0, d, [])
        monomials.sort(key=grlex_key)
        return MomentIndex(d, tuple(monomials))


def free_monomial_count(generators: int, d: int) -> int:
    """Number of monomials of degree <= d in a free commutative monoid"""
    return int(comb(generators + d, d, exact=True))


def multiply(a: Monomial, b: Monomial, reduce: bool, market: MarketSpec,
             mode: HierarchyMode = HierarchyMode.COMPACT) -> PolyElement:
    return PayoffAlgebra(market, mode, reduce).multiply(a, b)


def evaluate(p: PolyElement, x, market: MarketSpec) -> float:
    return PayoffAlgebra(market, HierarchyMode.UNBOUNDED, reduce=False).evaluate(p, x)


def build_index(d: int, mode: HierarchyMode, reduce: bool, market: MarketSpec) -> MomentIndex:
    return PayoffAlgebra(market, mode, reduce).build_index(d)


def main():
    """Print the moment index of a one-asset market"""
    from market_spec import BasketDef, SupportKind
    market = MarketSpec(1, (1.0,), (BasketDef((1.0,), 1.0),), (), SupportKind.COMPACT, (2.0,))
    for mode in HierarchyMode:
        for reduce in (False, True):
            index = build_index(2, mode, reduce, market)
            print(f"📊 {mode.value}, reduce={reduce}: s(2) = {index.size}")
            print("   " + ", ".join(mono.label() for mono in index.monomials))


if __name__ == "__main__":
    main()
