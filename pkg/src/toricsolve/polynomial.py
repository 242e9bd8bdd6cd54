"""Sparse Laurent polynomials with exact coefficients.

A coefficient is either a ``Fraction`` or, once a variable has been hidden,
a tuple of Fractions holding a univariate polynomial in the hidden variable
``x0`` (lowest degree first).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import DimensionMismatchError, ZeroPolynomialError

ExponentVector = tuple[int, ...]
X0Poly = tuple[Fraction, ...]
Coeff = Union[Fraction, X0Poly]


def as_x0_poly(c: Coeff) -> X0Poly:
    if isinstance(c, tuple):
        return c
    return (Fraction(c),)


def trim_x0_poly(p: Sequence[Fraction]) -> X0Poly:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def coeff_is_zero(c: Coeff) -> bool:
    return all(x == 0 for x in as_x0_poly(c))


def x0_degree(c: Coeff) -> int:
    return len(trim_x0_poly(as_x0_poly(c))) - 1


def eval_coeff(c: Coeff, x0: complex | float | None = None) -> complex | float:
    if not isinstance(c, tuple):
        return float(c)
    if x0 is None:
        if len(trim_x0_poly(c)) > 1:
            raise ValueError("coefficient depends on x0 but no x0 value given")
        return float(c[0])
    acc: complex | float = 0.0
    for a in reversed(c):
        acc = acc * x0 + float(a)
    return acc


@dataclass(frozen=True)
class Support:
    """Canonical (sorted, deduplicated) finite set of exponent vectors."""

    points: tuple[ExponentVector, ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("support must be nonempty")
        pts = tuple(sorted(set(tuple(int(x) for x in p) for p in self.points)))
        if len({len(p) for p in pts}) != 1:
            raise DimensionMismatchError("exponent vectors of different lengths")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points[0])

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def translate(self, shift: Sequence[int]) -> "Support":
        return Support(tuple(tuple(a + s for a, s in zip(p, shift)) for p in self.points))


@dataclass(frozen=True)
class SparsePolynomial:
    """Laurent polynomial stored as aligned (exponent, coefficient) tuples."""

    exponents: tuple[ExponentVector, ...]
    coeffs: tuple[Coeff, ...]

    def __post_init__(self):
        if len(self.exponents) != len(self.coeffs):
            raise ValueError("exponents and coefficients differ in length")
        if not self.exponents:
            raise ZeroPolynomialError()
        if any(coeff_is_zero(c) for c in self.coeffs):
            raise ValueError("stored coefficients must be nonzero")

    @property
    def n(self) -> int:
        return len(self.exponents[0])

    @property
    def support(self) -> Support:
        return Support(self.exponents)

    @property
    def terms(self) -> dict[ExponentVector, Coeff]:
        return dict(zip(self.exponents, self.coeffs))

    @property
    def x0_degree(self) -> int:
        return max(x0_degree(c) for c in self.coeffs)

    def coefficient_vector(self, x0: complex | float | None = None) -> np.ndarray:
        vals = [eval_coeff(c, x0) for c in self.coeffs]
        return np.asarray(vals, dtype=complex if any(isinstance(v, complex) for v in vals) else float)

    def max_coeff(self) -> float:
        """Largest absolute value over all (x0-expanded) coefficients."""
        return max(abs(float(a)) for c in self.coeffs for a in as_x0_poly(c))

    def __call__(self, point: Sequence[complex], x0: complex | float | None = None) -> complex:
        x = np.asarray(point, dtype=complex)
        exps = np.asarray(self.exponents, dtype=float)
        mons = np.prod(x[None, :] ** exps, axis=1)
        return complex(np.dot(self.coefficient_vector(x0), mons))

    def gradient(self, point: Sequence[complex]) -> np.ndarray:
        """Gradient with respect to x_1..x_n (coefficients must be x0-free)."""
        x = np.asarray(point, dtype=complex)
        exps = np.asarray(self.exponents, dtype=float)
        c = self.coefficient_vector()
        grad = np.zeros(self.n, dtype=complex)
        for k in range(self.n):
            e = exps.copy()
            mult = e[:, k].copy()
            e[:, k] -= 1
            grad[k] = np.sum(c * mult * np.prod(x[None, :] ** e, axis=1))
        return grad

    def __str__(self) -> str:
        parts = []
        for e, c in zip(self.exponents, self.coeffs):
            cs = str(c) if not isinstance(c, tuple) else "(" + " ".join(str(a) for a in c) + ")"
            parts.append(f"{cs}*x^{e}")
        return " + ".join(parts)


def support_of(raw: Mapping[Sequence[int], object] | Iterable[tuple[Sequence[int], object]]) -> SparsePolynomial:
    """Build a SparsePolynomial from exponent/coefficient pairs.

    ``raw`` is a mapping ``exponent -> coefficient`` or an iterable of
    ``(exponent, coefficient)`` pairs. Repeated exponents are merged by
    summing, zero coefficients are dropped.

    >>> support_of({(0, 0): 1, (2, 0): 3, (1, 1): 0}).exponents
    ((0, 0), (2, 0))
    """
    items = raw.items() if isinstance(raw, Mapping) else raw
    acc: dict[ExponentVector, list[Fraction]] = {}
    n = None
    for exp, c in items:
        e = tuple(int(x) for x in exp)
        if n is None:
            n = len(e)
        elif len(e) != n:
            raise DimensionMismatchError(f"exponent {e} has length {len(e)}, expected {n}")
        poly = [Fraction(a) for a in c] if isinstance(c, (tuple, list)) else [Fraction(c)]
        cur = acc.setdefault(e, [])
        if len(cur) < len(poly):
            cur.extend([Fraction(0)] * (len(poly) - len(cur)))
        for k, a in enumerate(poly):
            cur[k] += a
    exps, coeffs = [], []
    for e in sorted(acc):
        p = trim_x0_poly(acc[e])
        if all(a == 0 for a in p):
            continue
        exps.append(e)
        coeffs.append(p[0] if len(p) == 1 else p)
    if not exps:
        raise ZeroPolynomialError()
    return SparsePolynomial(tuple(exps), tuple(coeffs))

