"""Sylvester-type sparse resultant matrices.

Two builders are provided. ``build_subdivision_matrix`` indexes rows and
columns by lattice points of the shifted Minkowski sum and assigns each point
its row content from a coherent mixed subdivision, keeping only the greedy
closure of the distinguished polynomial's points. ``build_incremental_matrix``
grows per-polynomial multiplier sets along a direction ``v`` until a random
specialization has full column rank modulo two primes.

A matrix is defined by its row labels, its column monomials and the
perturbation or direction used. Entries are always regenerated from the
polynomials, so a stored definition can be reused with new coefficients.
"""

from __future__ import annotations

import io
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConstructionError, NonGenericLiftingError, SupportMismatchError, SystemFileError
from .polynomial import ExponentVector, SparsePolynomial, as_x0_poly, trim_x0_poly
from .polytope import (
    Cell,
    MixedSubdivision,
    lattice_points,
    minkowski_sum_all,
    mixed_subdivision,
    mv_deficient,
    newton_polytope,
)

log = logging.getLogger(__name__)

PRIMES = (2147483647, 2147483629)
DELTA_PRIMES = [p for p in range(1009, 10000) if all(p % q for q in range(2, int(p**0.5) + 1))]
MAX_DELTA_ATTEMPTS = 10
# perturbation coordinates are s/P * DELTA_SCALE, i.e. inside (0, DELTA_SCALE)
DELTA_SCALE = Fraction(1, 8)


@dataclass(frozen=True)
class RowLabel:
    poly_index: int
    multiplier: ExponentVector


@dataclass(frozen=True)
class ResultantMatrix:
    """Square matrix with rows ``x^multiplier * f_i`` and monomial columns."""

    rows: tuple[RowLabel, ...]
    columns: tuple[ExponentVector, ...]
    polys: tuple[SparsePolynomial, ...] = field(repr=False, compare=False)
    delta: tuple[Fraction, ...] | None = None
    direction: tuple[Fraction, ...] | None = None

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.columns[0])

    def row_counts(self) -> list[int]:
        counts = [0] * len(self.polys)
        for r in self.rows:
            counts[r.poly_index] += 1
        return counts

    @property
    def degree(self) -> int:
        """Highest power of x0 in any entry."""
        return max(p.x0_degree for p in self.polys)

    def structure(self) -> tuple:
        return (self.rows, self.columns, self.delta, self.direction)

    def exact_entries(self) -> list[list[tuple[Fraction, ...]]]:
        """Entries as x0-polynomials (tuples of Fractions, lowest degree first)."""
        col_index = {c: j for j, c in enumerate(self.columns)}
        zero = (Fraction(0),)
        out = []
        for r in self.rows:
            row = [zero] * len(self.columns)
            f = self.polys[r.poly_index]
            for e, c in zip(f.exponents, f.coeffs):
                q = tuple(a + b for a, b in zip(e, r.multiplier))
                row[col_index[q]] = as_x0_poly(c)
            out.append(row)
        return out

    def coefficient_stack(self) -> np.ndarray:
        """Array ``S`` of shape (d+1, dim, dim) with M(x0) = sum_k S[k] x0^k."""
        ex = self.exact_entries()
        d = self.degree
        out = np.zeros((d + 1, self.dim, len(self.columns)))
        for i, row in enumerate(ex):
            for j, p in enumerate(row):
                for k, a in enumerate(p):
                    if a:
                        out[k, i, j] = float(a)
        return out

    def evaluate(self, x0: complex | float | None = None) -> np.ndarray:
        stack = self.coefficient_stack()
        if x0 is None:
            if stack.shape[0] > 1:
                raise ValueError("matrix depends on x0; pass a value")
            return stack[0]
        acc = np.zeros(stack.shape[1:], dtype=np.result_type(stack, type(x0)))
        for k in range(stack.shape[0] - 1, -1, -1):
            acc = acc * x0 + stack[k]
        return acc

    def with_polys(self, polys: Sequence[SparsePolynomial]) -> "ResultantMatrix":
        """Same definition, entries taken from ``polys`` (supports must fit)."""
        check_definition(self.rows, self.columns, polys)
        return ResultantMatrix(self.rows, self.columns, tuple(polys), self.delta, self.direction)


def evaluation_error(m: ResultantMatrix, samples: int = 5, seed: int = 0) -> float:
    """Worst relative error of M [alpha^q] = [alpha^p f_i(alpha)] at random complex points.

    Each row multiplies its polynomial by its multiplier monomial, so
    multiplying M by the column monomials evaluated at alpha gives the row
    polynomials evaluated at alpha.
    """
    rng = np.random.default_rng(seed)
    cols = np.asarray(m.columns, dtype=float)
    worst = 0.0
    for _ in range(samples):
        alpha = np.exp(rng.uniform(-0.5, 0.5, m.n) + 1j * rng.uniform(0, 2 * np.pi, m.n))
        x0 = complex(rng.normal(), rng.normal()) if m.degree else None
        mat = m.evaluate(x0)
        mons = np.prod(alpha[None, :] ** cols, axis=1)
        lhs = mat @ mons
        rhs = np.array([np.prod(alpha ** np.asarray(r.multiplier, dtype=float)) * m.polys[r.poly_index](alpha, x0)
                        for r in m.rows])
        # entrywise, relative to the magnitude of the summands
        scale = np.maximum(np.abs(mat) @ np.abs(mons), np.finfo(float).tiny)
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / scale)))
    return worst


def check_definition(rows, columns, polys) -> None:
    cols = set(columns)
    if len(rows) != len(columns):
        raise SupportMismatchError("matrix definition is not square")
    used = set()
    for r in rows:
        if not 0 <= r.poly_index < len(polys):
            raise SupportMismatchError(f"row refers to polynomial {r.poly_index}, system has {len(polys)}")
        for e in polys[r.poly_index].exponents:
            q = tuple(a + b for a, b in zip(e, r.multiplier))
            if q not in cols:
                raise SupportMismatchError(f"monomial {q} of row {r} is not a column")
            used.add(q)
    if used != cols:
        raise SupportMismatchError("columns not covered by the row polynomials")


# --------------------------------------------------------------------------
# perturbation and row content


def draw_delta(n: int, rng: random.Random) -> tuple[Fraction, ...]:
    primes = rng.sample(DELTA_PRIMES, n)
    return tuple(Fraction(rng.randint(1, p - 1), p) * DELTA_SCALE for p in primes)


def candidate_points(sub: MixedSubdivision, delta: Sequence[Fraction]) -> list[tuple[ExponentVector, Cell]]:
    """Integer points of Q + delta, each with the cell containing it.

    Raises NonGenericLiftingError if some point lies on a cell boundary.
    """
    q = minkowski_sum_all([newton_polytope(s) for s in sub.supports])
    out = []
    for p in lattice_points(q, delta):
        x = [a - d for a, d in zip(p, delta)]
        winners = sub.locate(x)
        if len(winners) != 1 or not winners[0].contains(x, strict=True):
            raise NonGenericLiftingError(f"perturbation is not generic at point {p}")
        out.append((p, winners[0]))
    return out


def row_content(p: ExponentVector, cell: Cell) -> RowLabel:
    """Row of point ``p`` lying in ``cell + delta``: largest i with a vertex summand."""
    verts = cell.vertex_summands()
    if not verts:
        raise NonGenericLiftingError(f"cell of point {p} has no vertex summand")
    i = max(verts)
    a = cell.summands[i][0]
    return RowLabel(i, tuple(x - y for x, y in zip(p, a)))


def subdivision_points(polys: Sequence[SparsePolynomial], seed: int = 0):
    """(subdivision, delta, [(point, RowLabel)]) with retries on non-generic draws."""
    supports = [f.support for f in polys]
    rng = random.Random(seed)
    last = None
    for attempt in range(MAX_DELTA_ATTEMPTS):
        sub = mixed_subdivision(supports, seed=seed + 1000 * attempt)
        delta = draw_delta(supports[0].n, rng)
        try:
            pts = candidate_points(sub, delta)
            content = [(p, row_content(p, c)) for p, c in pts]
            return sub, delta, content
        except NonGenericLiftingError as exc:
            last = exc
    raise NonGenericLiftingError(f"no generic perturbation after {MAX_DELTA_ATTEMPTS} draws: {last}")


def build_subdivision_matrix(polys: Sequence[SparsePolynomial], seed: int = 0,
                             distinguished: int = 0) -> ResultantMatrix:
    """Greedy subdivision-based matrix.

    Starts from the points whose row content is ``distinguished`` and closes
    the set under "every monomial of an included row is included".
    """
    polys = tuple(polys)
    n = polys[0].n
    if len(polys) != n + 1:
        raise ConstructionError(f"need {n + 1} polynomials in {n} variables, got {len(polys)}")
    _, delta, content = subdivision_points(polys, seed)
    label = dict(content)
    chosen = {p for p, r in content if r.poly_index == distinguished}
    if not chosen:
        raise ConstructionError("distinguished polynomial owns no row; resultant degree is zero")
    frontier = list(chosen)
    while frontier:
        p = frontier.pop()
        r = label[p]
        for e in polys[r.poly_index].exponents:
            q = tuple(a + b for a, b in zip(e, r.multiplier))
            if q not in label:
                raise ConstructionError(f"row monomial {q} escaped Q + delta")
            if q not in chosen:
                chosen.add(q)
                frontier.append(q)
    cols = tuple(sorted(chosen))
    rows = tuple(label[p] for p in cols)
    return ResultantMatrix(rows, cols, polys, delta=tuple(delta))


# --------------------------------------------------------------------------
# modular rank


def _to_mod(x, p: int) -> int:
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ZeroDivisionError(f"denominator divisible by {p}")
    return x.numerator % p * pow(x.denominator, -1, p) % p


def modular_echelon(mat: np.ndarray, p: int) -> tuple[int, list[int]]:
    """Rank of an integer matrix mod p and the pivot row indices (row pivoting)."""
    a = np.array(mat, dtype=np.int64) % p
    m, ncols = a.shape
    pivots = []
    work = a.copy()
    perm = np.arange(m)
    r = 0
    for c in range(ncols):
        if r == m:
            break
        nz = np.nonzero(work[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            work[[r, k]] = work[[k, r]]
            perm[[r, k]] = perm[[k, r]]
        inv = pow(int(work[r, c]), -1, p)
        work[r] = work[r] * inv % p
        below = work[r + 1:, c].copy()
        if below.any():
            # (p-1)^2 < 2^62 keeps the products inside int64
            work[r + 1:] = (work[r + 1:] - (below[:, None] * work[r][None, :]) % p) % p
        pivots.append(int(perm[r]))
        r += 1
    return r, pivots


def modular_det(mat: np.ndarray, p: int) -> int:
    """Determinant of a square integer matrix mod p."""
    work = np.array(mat, dtype=np.int64) % p
    m = work.shape[0]
    det = 1
    for c in range(m):
        nz = np.nonzero(work[c:, c])[0]
        if nz.size == 0:
            return 0
        k = c + nz[0]
        if k != c:
            work[[c, k]] = work[[k, c]]
            det = -det
        piv = int(work[c, c])
        det = det * piv % p
        inv = pow(piv, -1, p)
        below = work[c + 1:, c] * inv % p
        if below.any():
            work[c + 1:] = (work[c + 1:] - (below[:, None] * work[c][None, :]) % p) % p
    return det % p


def modular_rank(mat, prime: int | None = None) -> int:
    """Rank of a rational matrix reduced modulo a prime (> 2^30).

    With ``prime=None`` the rank is taken over both PRIMES and the larger
    value is returned; a denominator divisible by one prime switches to the
    other.
    """
    primes = (prime,) if prime is not None else PRIMES
    ranks = []
    for p in primes:
        try:
            ints = np.array([[_to_mod(x, p) for x in row] for row in mat], dtype=np.int64).reshape(len(mat), -1)
        except ZeroDivisionError:
            continue
        ranks.append(modular_echelon(ints, p)[0])
    if not ranks:
        raise ZeroDivisionError("every prime divides a denominator")
    return max(ranks)


# --------------------------------------------------------------------------
# incremental construction


def _random_specialization(polys, rng: random.Random, p: int) -> list[dict]:
    return [{e: rng.randint(1, p - 1) for e in f.exponents} for f in polys]


def build_incremental_matrix(polys: Sequence[SparsePolynomial], v: Sequence[Fraction] | None = None,
                             seed: int = 0) -> ResultantMatrix:
    """Incremental construction along direction ``v`` with modular rank tests."""
    polys = tuple(polys)
    n = polys[0].n
    if len(polys) != n + 1:
        raise ConstructionError(f"need {n + 1} polynomials in {n} variables, got {len(polys)}")
    rng = random.Random(seed)
    if v is None:
        v = tuple(Fraction(rng.choice([-1, 1]) * rng.randint(1, 97), rng.randint(1, 97)) for _ in range(n))
    v = tuple(Fraction(x) for x in v)
    if any(x == 0 for x in v):
        raise ConstructionError("direction must have nonzero coordinates")
    supports = [f.support for f in polys]
    mvs, _ = mv_deficient(supports, seed=seed)
    hulls = [newton_polytope(s) for s in supports]
    delta = draw_delta(n, rng)
    bound = len(lattice_points(minkowski_sum_all(hulls), delta))
    cands = []
    for i in range(n + 1):
        others = minkowski_sum_all([h for j, h in enumerate(hulls) if j != i]) if n > 0 else None
        pts = lattice_points(others, delta)
        pts.sort(key=lambda b: (-sum(x * y for x, y in zip(v, b)), b))
        cands.append(pts)
    sizes = [min(mv, len(c)) for mv, c in zip(mvs, cands)]
    specialized = [_random_specialization(polys, rng, p) for p in PRIMES]

    while True:
        rows = [RowLabel(i, b) for i in range(n + 1) for b in cands[i][:sizes[i]]]
        cols = sorted({tuple(a + b for a, b in zip(e, r.multiplier))
                       for r in rows for e in polys[r.poly_index].exponents})
        if len(cols) > bound:
            raise ConstructionError("no Sylvester-type matrix found at this size bound")
        log.debug("incremental candidate: %d rows x %d cols (sizes %s)", len(rows), len(cols), sizes)
        col_index = {c: j for j, c in enumerate(cols)}
        full = True
        pivots = None
        if len(rows) >= len(cols):
            for p, vals in zip(PRIMES, specialized):
                mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
                for k, r in enumerate(rows):
                    for e in polys[r.poly_index].exponents:
                        q = tuple(a + b for a, b in zip(e, r.multiplier))
                        mat[k, col_index[q]] = vals[r.poly_index][e]
                rank, piv = modular_echelon(mat, p)
                if rank < len(cols):
                    full = False
                    break
                pivots = piv if pivots is None else pivots
        else:
            full = False
        if full:
            keep = sorted(pivots)
            chosen = tuple(rows[k] for k in keep)
            try:
                check_definition(chosen, cols, polys)
            except SupportMismatchError:
                full = False
            else:
                return ResultantMatrix(chosen, tuple(cols), polys, delta=None, direction=v)
        grown = False
        for i in range(n + 1):
            if sizes[i] < len(cands[i]):
                sizes[i] += 1
                grown = True
        if not grown:
            raise ConstructionError("no Sylvester-type matrix found at this size bound")


# --------------------------------------------------------------------------
# definition files


def _fmt_vec(v) -> str:
    return " ".join(str(x) for x in v)


def store_matrix(m: ResultantMatrix, path: str | Path) -> None:
    Path(path).write_text(dumps_matrix(m))


def dumps_matrix(m: ResultantMatrix) -> str:
    out = io.StringIO()
    out.write(f"SRMAT 1 n={m.n} npolys={len(m.polys)} dim={m.dim}\n")
    if m.direction is not None:
        out.write(f"DIR {_fmt_vec(m.direction)}\n")
    else:
        out.write(f"DELTA {_fmt_vec(m.delta)}\n")
    out.write("COLS\n")
    for c in m.columns:
        out.write(_fmt_vec(c) + "\n")
    out.write("ROWS\n")
    for r in m.rows:
        out.write(f"{r.poly_index} {_fmt_vec(r.multiplier)}\n")
    return out.getvalue()


def load_matrix(path: str | Path, polys: Sequence[SparsePolynomial]) -> ResultantMatrix:
    return loads_matrix(Path(path).read_text(), polys)


def loads_matrix(text: str, polys: Sequence[SparsePolynomial]) -> ResultantMatrix:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    try:
        head = lines[0].split()
        if head[:2] != ["SRMAT", "1"]:
            raise SystemFileError("not an SRMAT 1 file")
        kv = dict(tok.split("=") for tok in head[2:])
        n, npolys, dim = int(kv["n"]), int(kv["npolys"]), int(kv["dim"])
        tag, *vals = lines[1].split()
        vec = tuple(Fraction(x) for x in vals)
        if tag not in ("DELTA", "DIR") or len(vec) != n:
            raise SystemFileError("expected DELTA or DIR line with n rationals")
        if lines[2] != "COLS" or lines[3 + dim] != "ROWS":
            raise SystemFileError("malformed COLS/ROWS sections")
        cols = tuple(tuple(int(x) for x in ln.split()) for ln in lines[3:3 + dim])
        rows = []
        for ln in lines[4 + dim:4 + 2 * dim]:
            toks = [int(x) for x in ln.split()]
            rows.append(RowLabel(toks[0], tuple(toks[1:])))
        if len(rows) != dim or len(lines) != 4 + 2 * dim:
            raise SystemFileError("row count does not match dim")
        if any(len(c) != n for c in cols) or any(len(r.multiplier) != n for r in rows):
            raise SystemFileError("exponent vector of wrong length")
    except (IndexError, ValueError, KeyError) as exc:
        if isinstance(exc, SystemFileError):
            raise
        raise SystemFileError(f"malformed matrix definition: {exc}") from exc
    polys = tuple(polys)
    if len(polys) != npolys or polys[0].n != n:
        raise SupportMismatchError(f"definition is for {npolys} polynomials in {n} variables")
    check_definition(rows, cols, polys)
    if tag == "DIR":
        return ResultantMatrix(tuple(rows), cols, polys, delta=None, direction=vec)
    return ResultantMatrix(tuple(rows), cols, polys, delta=vec, direction=None)


def exact_determinant(m: ResultantMatrix, x0: Fraction | None = None) -> Fraction:
    """Exact determinant of the matrix (entries specialized at x0 if given)."""
    ex = m.exact_entries()
    a = []
    for row in ex:
        vals = []
        for p in row:
            p = trim_x0_poly(p)
            if len(p) > 1 and x0 is None:
                raise ValueError("matrix depends on x0; pass a value")
            acc = Fraction(0)
            for c in reversed(p):
                acc = acc * (x0 or 0) + c
            vals.append(acc)
        a.append(vals)
    return _det_frac(a)


def _det_frac(a: list[list[Fraction]]) -> Fraction:
    a = [row[:] for row in a]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        p = a[c][c]
        det *= p
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / p
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det
