"""Plain-text polynomial system files.

::

    SYS 1
    N 3
    POLY 2
    TERM 1/2 1 0 0
    TERM -3 0 0 0
    ...
    UCOEF 17 -23 31      # optional
    HIDE 3               # optional, 1-based
    DIR 1/3 1/5 1/7      # optional
    SEED 0               # optional

Coefficients are exact rationals; decimal points are rejected. ``#`` starts
a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

from .errors import SystemFileError, ZeroPolynomialError
from .polynomial import SparsePolynomial, support_of

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")

FIXTURES = {
    "synthetic": "synthetic.sys",
    "cyclohexane-perturbed": "cyclohexane_perturbed.sys",
    "cyclohexane-generic": "cyclohexane_generic.sys",
}


@dataclass(frozen=True)
class SystemFile:
    n: int
    polys: tuple[SparsePolynomial, ...]
    direction: tuple[Fraction, ...] | None = None
    u_coeffs: tuple[int, ...] | None = None
    hide: int | None = None
    seed: int | None = None

    @property
    def is_square(self) -> bool:
        return len(self.polys) == self.n


def parse_rational(tok: str, lineno: int) -> Fraction:
    if not _RATIONAL.match(tok):
        raise SystemFileError(f"line {lineno}: expected an exact rational, got {tok!r}")
    value = Fraction(tok)
    return value


def _ints(toks: Sequence[str], lineno: int) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in toks)
    except ValueError:
        raise SystemFileError(f"line {lineno}: expected integers, got {' '.join(toks)!r}") from None


def loads_system(text: str) -> SystemFile:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].split()
        if body:
            lines.append((lineno, body))
    if not lines or lines[0][1] != ["SYS", "1"]:
        raise SystemFileError("missing 'SYS 1' header")
    n = None
    polys: list[list[tuple[tuple[int, ...], Fraction]]] = []
    expected: list[int] = []
    extra: dict[str, object] = {}
    for lineno, toks in lines[1:]:
        key, args = toks[0], toks[1:]
        if key == "N":
            if n is not None or len(args) != 1:
                raise SystemFileError(f"line {lineno}: bad N line")
            (n,) = _ints(args, lineno)
            if n < 1:
                raise SystemFileError(f"line {lineno}: N must be positive")
        elif key == "POLY":
            if n is None:
                raise SystemFileError(f"line {lineno}: POLY before N")
            if polys and len(polys[-1]) != expected[-1]:
                raise SystemFileError(f"line {lineno}: previous POLY declared {expected[-1]} terms, got {len(polys[-1])}")
            if len(args) != 1:
                raise SystemFileError(f"line {lineno}: bad POLY line")
            (m,) = _ints(args, lineno)
            if m < 1:
                raise SystemFileError(f"line {lineno}: a polynomial needs at least one term")
            polys.append([])
            expected.append(m)
        elif key == "TERM":
            if not polys:
                raise SystemFileError(f"line {lineno}: TERM outside POLY")
            if len(args) != n + 1:
                raise SystemFileError(f"line {lineno}: TERM needs a coefficient and {n} exponents")
            polys[-1].append((_ints(args[1:], lineno), parse_rational(args[0], lineno)))
        elif key == "DIR":
            if n is None or len(args) != n:
                raise SystemFileError(f"line {lineno}: DIR needs {n} rationals")
            extra["direction"] = tuple(parse_rational(a, lineno) for a in args)
        elif key == "UCOEF":
            if n is None or len(args) != n:
                raise SystemFileError(f"line {lineno}: UCOEF needs {n} integers")
            extra["u_coeffs"] = _ints(args, lineno)
        elif key == "HIDE":
            if n is None or len(args) != 1:
                raise SystemFileError(f"line {lineno}: bad HIDE line")
            (k,) = _ints(args, lineno)
            if not 1 <= k <= n:
                raise SystemFileError(f"line {lineno}: HIDE index {k} out of range 1..{n}")
            extra["hide"] = k
        elif key == "SEED":
            if len(args) != 1:
                raise SystemFileError(f"line {lineno}: bad SEED line")
            (extra["seed"],) = _ints(args, lineno)
        else:
            raise SystemFileError(f"line {lineno}: unknown keyword {key!r}")
    if n is None:
        raise SystemFileError("missing N line")
    if not polys:
        raise SystemFileError("no polynomials")
    if len(polys[-1]) != expected[-1]:
        raise SystemFileError(f"last POLY declared {expected[-1]} terms, got {len(polys[-1])}")
    try:
        parsed = tuple(support_of(terms) for terms in polys)
    except ZeroPolynomialError as exc:
        raise SystemFileError(str(exc)) from exc
    if len(parsed) not in (n, n + 1):
        raise SystemFileError(f"{len(parsed)} polynomials in {n} variables: expected {n} or {n + 1}")
    return SystemFile(n, parsed, **extra)


def load_system(path: str | Path) -> SystemFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SystemFileError(f"cannot read {path}: {exc}") from exc
    return loads_system(text)


def dumps_system(sf: SystemFile) -> str:
    out = ["SYS 1", f"N {sf.n}"]
    for f in sf.polys:
        if f.x0_degree:
            raise ValueError("system files hold constant coefficients only")
        out.append(f"POLY {len(f.exponents)}")
        for e, c in zip(f.exponents, f.coeffs):
            out.append(f"TERM {c} " + " ".join(map(str, e)))
    if sf.direction is not None:
        out.append("DIR " + " ".join(map(str, sf.direction)))
    if sf.u_coeffs is not None:
        out.append("UCOEF " + " ".join(map(str, sf.u_coeffs)))
    if sf.hide is not None:
        out.append(f"HIDE {sf.hide}")
    if sf.seed is not None:
        out.append(f"SEED {sf.seed}")
    return "\n".join(out) + "\n"


def store_system(sf: SystemFile, path: str | Path) -> None:
    Path(path).write_text(dumps_system(sf))


def fixture_path(name: str) -> Path:
    """Path of a bundled example system (see ``FIXTURES``)."""
    try:
        fname = FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
    return Path(str(resources.files("toricsolve") / "data" / fname))


def load_fixture(name: str) -> SystemFile:
    return load_system(fixture_path(name))
