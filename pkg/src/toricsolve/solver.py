"""Root finding by reduction to an eigenproblem on a resultant matrix.

Pipeline: add a generic linear form (or hide a variable) to get n+1
polynomials in n variables, build a resultant matrix M(x0), split off a
well-conditioned constant block M11 and work with the Schur complement
A(x0), rank-balance it, and read the roots off the eigenvectors of its
companion matrix (or of a pencil when the leading coefficient is singular).
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ConstructionError, DimensionMismatchError, NumericError
from .exact import lattice_combination
from .numeric import (
    DEFAULT_COND_THRESHOLD,
    LUFactorization,
    cond_inf,
    eigen,
    generalized_eigen,
    lu_col_pivot,
    solve_tiered,
)
from .polynomial import SparsePolynomial, as_x0_poly, support_of
from .resultant import PRIMES, ResultantMatrix, _to_mod, build_incremental_matrix, build_subdivision_matrix, modular_det, modular_echelon

log = logging.getLogger(__name__)

REAL_TOL = 1e-8
CLUSTER_TOL = 1e-6
ACCEPT_TOL = 1e-4


# --------------------------------------------------------------------------
# overconstrained systems


@dataclass(frozen=True)
class OverconstrainedSystem:
    """n+1 polynomials in n variables whose coefficients may involve x0.

    ``square`` keeps the original well-constrained system. In hidden mode
    ``hidden_index`` is the 0-based index of the hidden variable in it.
    """

    polys: tuple[SparsePolynomial, ...]
    mode: str
    square: tuple[SparsePolynomial, ...]
    u_coeffs: tuple[int, ...] | None = None
    hidden_index: int | None = None

    @property
    def n(self) -> int:
        return self.polys[0].n


def overconstrain(system: Sequence[SparsePolynomial], mode: str = "u", hidden_index: int | None = None,
                  seed: int = 0, u_coeffs: Sequence[int] | None = None) -> OverconstrainedSystem:
    square = tuple(system)
    n = square[0].n
    if len(square) != n:
        raise DimensionMismatchError(f"well-constrained system expected: {len(square)} polynomials in {n} variables")
    if any(x0dep(f) for f in square):
        raise ValueError("input coefficients must be constants")
    if mode == "u":
        if u_coeffs is None:
            rng = random.Random(seed)
            u_coeffs = tuple(rng.choice([-1, 1]) * rng.randint(1, 99) for _ in range(n))
        u_coeffs = tuple(int(c) for c in u_coeffs)
        if len(u_coeffs) != n or any(c == 0 for c in u_coeffs):
            raise ValueError("u-coefficients must be n nonzero integers")
        terms = [((0,) * n, (0, 1))]
        for j, c in enumerate(u_coeffs):
            e = [0] * n
            e[j] = 1
            terms.append((tuple(e), c))
        f0 = support_of(terms)
        return OverconstrainedSystem((f0,) + square, "u", square, u_coeffs=u_coeffs)
    if mode == "hidden":
        if hidden_index is None or not 0 <= hidden_index < n:
            raise ValueError(f"hidden variable index {hidden_index} out of range for {n} variables")
        k = hidden_index
        polys = []
        for f in square:
            acc: dict[tuple, dict[int, Fraction]] = {}
            for e, c in zip(f.exponents, f.coeffs):
                rest = e[:k] + e[k + 1:]
                acc.setdefault(rest, {})
                acc[rest][e[k]] = acc[rest].get(e[k], Fraction(0)) + c
            terms = []
            for rest, powers in acc.items():
                lo = min(powers)
                if lo < 0:
                    raise ValueError("negative powers of the hidden variable are not supported")
                poly = [Fraction(0)] * (max(powers) + 1)
                for p, c in powers.items():
                    poly[p] = c
                terms.append((rest, tuple(poly)))
            polys.append(support_of(terms))
        return OverconstrainedSystem(tuple(polys), "hidden", square, hidden_index=k)
    raise ValueError(f"unknown mode {mode!r}")


def x0dep(f: SparsePolynomial) -> bool:
    return f.x0_degree > 0


def build_matrix(oc: OverconstrainedSystem, algo: str = "incremental", seed: int = 0,
                 direction: Sequence[Fraction] | None = None) -> ResultantMatrix:
    if algo == "incremental":
        return build_incremental_matrix(oc.polys, v=direction, seed=seed)
    if algo == "subdivision":
        return build_subdivision_matrix(oc.polys, seed=seed)
    raise ValueError(f"unknown matrix algorithm {algo!r}")


def specialized_deficit(m: ResultantMatrix, seed: int = 0) -> int:
    """Rank deficit of M(x0) for the actual coefficients at a random x0, mod a prime.

    Generic nonsingularity (what the builders certify) does not cover
    nongeneric inputs: symmetric coefficients can make det M vanish
    identically, and then kernels at roots are too large to read roots from.
    """
    p = PRIMES[0]
    x0 = random.Random(seed).randrange(2, p - 1)
    mat = _specialize_mod(m, x0, p)
    return m.dim - modular_echelon(mat, p)[0]


def build_regular_matrix(oc: OverconstrainedSystem, algo: str = "incremental", seed: int = 0,
                         direction: Sequence[Fraction] | None = None,
                         attempts: int = 10) -> tuple[ResultantMatrix, int]:
    """Build a matrix that stays nonsingular for the given coefficients.

    Rebuilds with seeds ``seed, seed+1, ...`` while M(x0) is identically
    singular. Returns the matrix and the seed that produced it.
    """
    for t in range(attempts):
        m = build_matrix(oc, algo, seed + t, direction)
        deficit = specialized_deficit(m, seed + t)
        if deficit == 0:
            return m, seed + t
        log.info("seed %d: matrix of dim %d is singular for these coefficients (deficit %d); rebuilding",
                 seed + t, m.dim, deficit)
    raise ConstructionError(f"no matrix nonsingular for these coefficients after {attempts} seeds")


def assemble(oc: OverconstrainedSystem, m: ResultantMatrix) -> np.ndarray:
    """Numeric coefficient stack S with M(x0) = sum_k S[k] x0^k."""
    if len(m.polys) != len(oc.polys) or m.polys != oc.polys:
        m = m.with_polys(oc.polys)
    return m.coefficient_stack()


# --------------------------------------------------------------------------
# Schur complement


@dataclass
class SchurSystem:
    stack: np.ndarray
    r1: np.ndarray
    c1: np.ndarray
    r2: np.ndarray
    c2: np.ndarray
    fact: LUFactorization | None
    x_blocks: list[np.ndarray]
    a_coeffs: list[np.ndarray]
    whole_matrix: bool = False
    tiers: list[str] = field(default_factory=list)

    @property
    def r(self) -> int:
        return len(self.c2)

    @property
    def d(self) -> int:
        return len(self.a_coeffs) - 1

    def a_at(self, x0: complex) -> np.ndarray:
        acc = np.zeros_like(self.a_coeffs[0], dtype=complex)
        for ak in reversed(self.a_coeffs):
            acc = acc * x0 + ak
        return acc

    def m_at(self, x0: complex) -> np.ndarray:
        acc = np.zeros(self.stack.shape[1:], dtype=complex)
        for sk in reversed(self.stack):
            acc = acc * x0 + sk
        return acc

    def back_substitute(self, x0: complex, vb: np.ndarray) -> np.ndarray:
        """Full column vector (in original column order) from its C2 part."""
        full = np.zeros(self.stack.shape[2], dtype=complex)
        full[self.c2] = vb
        if len(self.c1):
            v1 = np.zeros(len(self.c1), dtype=complex)
            for k, xk in enumerate(self.x_blocks):
                v1 -= (x0**k) * (xk @ vb)
            full[self.c1] = v1
        return full


def _trim(coeffs: list[np.ndarray]) -> list[np.ndarray]:
    scale = max((np.abs(c).max() for c in coeffs if c.size), default=0.0)
    while len(coeffs) > 1 and np.abs(coeffs[-1]).max(initial=0.0) <= 1e-14 * scale:
        coeffs = coeffs[:-1]
    return coeffs


def partition_and_schur(stack: np.ndarray, cond_threshold: float = DEFAULT_COND_THRESHOLD,
                        whole_matrix: bool = False) -> SchurSystem:
    """Choose M11 and form A(x0) = M22 - M21 M11^{-1} M12 coefficient-wise."""
    stack = np.asarray(stack, dtype=float)
    nrow, ncol = stack.shape[1:]
    if nrow != ncol:
        raise ValueError("square matrix expected")
    everything = np.arange(nrow)

    def whole():
        return SchurSystem(stack, np.array([], int), np.array([], int), everything, everything, None, [],
                           _trim([stack[k] for k in range(stack.shape[0])]), whole_matrix=True)

    if whole_matrix:
        return whole()
    const_cols = np.nonzero(~np.any(stack[1:] != 0, axis=(0, 1)))[0] if stack.shape[0] > 1 else everything
    if const_cols.size == 0:
        return whole()
    block = stack[0][:, const_cols]
    live_rows = np.nonzero(np.any(block != 0, axis=1))[0]
    if live_rows.size == 0:
        return whole()
    fact = lu_col_pivot(block[live_rows], cond_threshold)
    k = fact.rank
    growth = fact.pivot_growth()
    while k > 0 and growth[k - 1] > cond_threshold:
        k -= 1
    while k > 0 and fact.leading_condition(k) > cond_threshold:
        k -= 1
    if k == 0:
        log.info("no well-conditioned constant block; using the whole matrix")
        return whole()
    r1 = live_rows[fact.row_perm[:k]]
    c1 = const_cols[fact.col_perm[:k]]
    r2 = np.setdiff1d(everything, r1)
    c2 = np.setdiff1d(everything, c1)
    m11 = stack[0][np.ix_(r1, c1)]
    f11 = lu_col_pivot(m11, cond_threshold)
    x_blocks, a_coeffs, tiers = [], [], []
    m21 = stack[0][np.ix_(r2, c1)]
    for deg in range(stack.shape[0]):
        m12 = stack[deg][np.ix_(r1, c2)]
        sol = solve_tiered(f11, m12)
        tiers.append(sol.tier)
        x_blocks.append(sol.x)
        a_coeffs.append(stack[deg][np.ix_(r2, c2)] - m21 @ sol.x)
    return SchurSystem(stack, r1, c1, r2, c2, f11, x_blocks, _trim(a_coeffs), tiers=tiers)


def schur_identity_error(schur: SchurSystem, samples: int = 5, seed: int = 0) -> float:
    """Worst relative deviation from det M(x0) = det M11 * det A(x0) at random real x0."""
    rng = np.random.default_rng(seed)
    m11 = schur.stack[0][np.ix_(schur.r1, schur.c1)]
    s11, l11 = np.linalg.slogdet(m11) if len(schur.r1) else (1.0, 0.0)
    # row/column orders of the blocks permute M; account for the sign
    order_r = np.concatenate([schur.r1, schur.r2])
    order_c = np.concatenate([schur.c1, schur.c2])
    perm_sign = _perm_sign(order_r) * _perm_sign(order_c)
    worst = 0.0
    for _ in range(samples):
        x0 = rng.uniform(-2, 2)
        sm, lm = np.linalg.slogdet(schur.m_at(x0).real)
        sa, la = np.linalg.slogdet(schur.a_at(x0).real)
        if sm == 0:
            return float("inf")
        ratio = perm_sign * s11 * sa / sm * np.exp(l11 + la - lm)
        worst = max(worst, abs(1.0 - ratio))
    return float(worst)


def _perm_sign(p: np.ndarray) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


# --------------------------------------------------------------------------
# rank balancing and linearization


@dataclass(frozen=True)
class RankBalanceTransform:
    t1: int
    t2: int
    t3: int
    t4: int

    def __post_init__(self):
        if self.t1 * self.t4 - self.t2 * self.t3 == 0:
            raise ValueError("degenerate Moebius transform")

    @property
    def is_identity(self) -> bool:
        return (self.t1, self.t2, self.t3, self.t4) == (1, 0, 0, 1)

    def back(self, mu: complex) -> complex:
        den = self.t3 * mu + self.t4
        if den == 0:
            return complex("inf")
        return (self.t1 * mu + self.t2) / den


IDENTITY = RankBalanceTransform(1, 0, 0, 1)


def transform_coeffs(a: Sequence[np.ndarray], t: RankBalanceTransform) -> list[np.ndarray]:
    """Coefficients of (t3 y + t4)^d A((t1 y + t2)/(t3 y + t4))."""
    d = len(a) - 1
    out = [np.zeros_like(a[0], dtype=float) for _ in range(d + 1)]
    for k, ak in enumerate(a):
        p = np.polynomial.polynomial.polypow([t.t2, t.t1], k) if k else np.array([1.0])
        q = np.polynomial.polynomial.polypow([t.t4, t.t3], d - k) if d - k else np.array([1.0])
        prod = np.polynomial.polynomial.polymul(p, q)
        for j, c in enumerate(prod):
            if j <= d and c:
                out[j] = out[j] + c * ak
    return out


def rank_balance(a: Sequence[np.ndarray], tries: int = 3, seed: int = 0,
                 cond_threshold: float = DEFAULT_COND_THRESHOLD) -> tuple[RankBalanceTransform, list[np.ndarray], float]:
    """Pick the transform (identity included) whose leading coefficient is best conditioned.

    Returns ``(transform, coefficients, kappa)``; ``kappa > cond_threshold``
    means the companion path is unusable and the pencil should be used.
    """
    rng = random.Random(seed)
    best = (IDENTITY, list(a), cond_inf(a[-1]))
    if best[2] <= 1.0 + 1e-12:
        return best
    for _ in range(tries):
        while True:
            t = [rng.randint(-9, 9) for _ in range(4)]
            if t[0] * t[3] - t[1] * t[2] != 0 and t[2] != 0:
                break
        tr = RankBalanceTransform(*t)
        coeffs = transform_coeffs(a, tr)
        kappa = cond_inf(coeffs[-1])
        if kappa < best[2]:
            best = (tr, coeffs, kappa)
    return best


def companion(a: Sequence[np.ndarray]) -> np.ndarray:
    """Block companion matrix of A_d^{-1} A(x); d = 1 gives -A_1^{-1} A_0."""
    d = len(a) - 1
    if d < 1:
        raise ValueError("matrix polynomial of degree >= 1 expected")
    r = a[0].shape[0]
    fact = lu_col_pivot(a[-1])
    if not fact.nonsingular:
        raise NumericError("leading coefficient is singular")
    c = np.zeros((r * d, r * d))
    for i in range(d - 1):
        c[i * r:(i + 1) * r, (i + 1) * r:(i + 2) * r] = np.eye(r)
    for k in range(d):
        c[(d - 1) * r:, k * r:(k + 1) * r] = -solve_tiered(fact, a[k]).x
    return c


def pencil(a: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Linearization C1 x + C0 with C1 = blockdiag(I, ..., I, A_d)."""
    d = len(a) - 1
    r = a[0].shape[0]
    c1 = np.eye(r * d)
    c1[(d - 1) * r:, (d - 1) * r:] = a[-1]
    c0 = np.zeros((r * d, r * d))
    for i in range(d - 1):
        c0[i * r:(i + 1) * r, (i + 1) * r:(i + 2) * r] = -np.eye(r)
    for k in range(d):
        c0[(d - 1) * r:, k * r:(k + 1) * r] = a[k]
    return c1, c0


# --------------------------------------------------------------------------
# root recovery


@dataclass
class RootCandidate:
    """One eigenvalue and what it says about a root.

    ``point`` holds (x0, x_1, ..., x_n) with x0 the eigenvalue: the linear
    form's value in u mode, the hidden coordinate in hidden mode.
    """

    eigenvalue: complex
    point: np.ndarray | None
    residuals: np.ndarray | None
    status: str
    is_real: bool
    alpha_beta: tuple[complex, complex] | None = None
    raw_point: np.ndarray | None = None
    raw_residuals: np.ndarray | None = None
    note: str = ""

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals is not None else float("inf")

    @property
    def coordinates(self) -> np.ndarray | None:
        """Root in the original n variables."""
        return None if self.point is None else self.point[1:]


@dataclass
class SolveReport:
    candidates: list[RootCandidate]
    path: str
    r: int
    d: int
    transform: RankBalanceTransform
    leading_kappa: float
    counts: dict[str, int]
    partition: str = "schur"
    n_finite: int | None = None
    schur: SchurSystem | None = field(default=None, repr=False)

    @property
    def accepted(self) -> list[RootCandidate]:
        return [c for c in self.candidates if c.status == "accepted"]

    @property
    def accepted_real(self) -> list[RootCandidate]:
        return [c for c in self.accepted if c.is_real]

    @property
    def multiple(self) -> list[RootCandidate]:
        return [c for c in self.candidates if c.status == "multiple"]


@dataclass(frozen=True)
class SolveOptions:
    cond_threshold: float = DEFAULT_COND_THRESHOLD
    accept: float = ACCEPT_TOL
    tries: int = 3
    seed: int = 0
    whole_matrix: bool = False
    newton_steps: int = 3
    newton_tol: float = 1e-12
    cluster_tol: float = CLUSTER_TOL


def is_real(z: complex) -> bool:
    return abs(z.imag) < REAL_TOL * (1 + abs(z.real))


def recover_monomials(columns: Sequence[tuple[int, ...]], values: np.ndarray) -> np.ndarray | None:
    """Coordinates from monomial values by ratios of unit-difference pairs.

    Falls back to an integer combination of exponent differences when some
    coordinate has no unit-difference pair. Returns None on zero denominators.
    """
    n = len(columns[0])
    index = {c: j for j, c in enumerate(columns)}
    mags = np.abs(values)
    top = mags.max()
    if top == 0:
        return None
    tiny = 1e-13 * top
    out = np.empty(n, dtype=complex)
    missing = []
    for i in range(n):
        best = None
        for q2, j2 in index.items():
            q1 = q2[:i] + (q2[i] + 1,) + q2[i + 1:]
            j1 = index.get(q1)
            if j1 is None:
                continue
            key = (mags[j2], tuple(-x for x in q2))
            if best is None or key > best[0]:
                best = (key, j1, j2)
        if best is None:
            missing.append(i)
            continue
        if mags[best[2]] <= tiny:
            return None
        out[i] = values[best[1]] / values[best[2]]
    if missing:
        ref = int(np.argmax(mags))
        order = sorted((j for j in range(len(columns)) if j != ref and mags[j] > tiny), key=lambda j: -mags[j])
        diffs = [tuple(a - b for a, b in zip(columns[j], columns[ref])) for j in order]
        combo = lattice_combination(diffs, n)
        if combo is None:
            return None
        logs = {j: values[j] / values[ref] for j in order}
        for i in missing:
            val = complex(1.0)
            for coef, j in zip(combo[i], order):
                if coef:
                    val *= logs[j] ** coef
            out[i] = val
    return out


def normalized_residuals(polys: Sequence[SparsePolynomial], point: np.ndarray, x0: complex | None) -> np.ndarray:
    return np.array([abs(f(point, x0)) / f.max_coeff() for f in polys])


def newton_refine(square: Sequence[SparsePolynomial], x: np.ndarray, steps: int = 3,
                  tol: float = 1e-12) -> np.ndarray:
    x = np.asarray(x, dtype=complex).copy()
    for _ in range(steps):
        fx = np.array([f(x) for f in square])
        jac = np.array([f.gradient(x) for f in square])
        try:
            dx = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            break
        x = x + dx
        if np.linalg.norm(dx) <= tol * (1 + np.linalg.norm(x)):
            break
    return x


def _clusters(values: Sequence[complex], tol: float) -> list[int]:
    """Size of the cluster each (finite) value belongs to."""
    sizes = []
    for v in values:
        if not np.isfinite(v):
            sizes.append(1)
            continue
        sizes.append(sum(1 for w in values if np.isfinite(w) and abs(w - v) <= tol * (1 + abs(v))))
    return sizes


def _specialize_mod(m: ResultantMatrix, x0: int, p: int) -> np.ndarray:
    col_index = {c: j for j, c in enumerate(m.columns)}
    mat = np.zeros((m.dim, m.dim), dtype=np.int64)
    for i, row in enumerate(m.rows):
        f = m.polys[row.poly_index]
        for e, c in zip(f.exponents, f.coeffs):
            q = tuple(a + b for a, b in zip(e, row.multiplier))
            acc = 0
            for c_k in reversed(as_x0_poly(c)):
                acc = (acc * x0 + _to_mod(c_k, p)) % p
            mat[i, col_index[q]] = acc
    return mat


def finite_eigen_count(m: ResultantMatrix, seed: int = 0) -> int | None:
    """Degree of det M(x0) for the actual coefficients, computed mod a prime.

    Since det M = det M11 * det A(x0), this is the number of finite
    eigenvalues with multiplicity. None when det M vanishes identically.
    """
    p = PRIMES[0]
    bound = sum(m.polys[row.poly_index].x0_degree for row in m.rows)
    start = random.Random(seed).randrange(2, p - bound - 2)
    xs = [start + k for k in range(bound + 1)]
    coef = [modular_det(_specialize_mod(m, x, p), p) for x in xs]
    # Newton divided differences; the last nonzero one gives the degree
    for j in range(1, len(xs)):
        for i in range(len(xs) - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) * pow(xs[i] - xs[i - j], -1, p) % p
    nonzero = [i for i, c in enumerate(coef) if c]
    return nonzero[-1] if nonzero else None


def _infinite_mask(raw, n_finite: int | None, inf_tol: float = 1e-10) -> list[bool]:
    """Mark infinite eigenvalues.

    With a known finite count the surplus eigenvalues with the smallest
    |beta| (relative to |alpha|) are infinite: perturbed defective infinite
    eigenvalues can look finite and large. Otherwise fall back to a tolerance.
    """
    rho = []
    for alpha, beta, vec in raw:
        nrm = np.hypot(abs(alpha), abs(beta))
        rho.append(abs(beta) / nrm if nrm else 0.0)
    if n_finite is None or n_finite > len(raw):
        return [r_ <= inf_tol for r_ in rho]
    order = np.argsort(rho, kind="stable")
    mask = [False] * len(raw)
    for i in order[: len(raw) - n_finite]:
        mask[i] = True
    return mask


def solve_roots(oc: OverconstrainedSystem, m: ResultantMatrix, opts: SolveOptions = SolveOptions()) -> SolveReport:
    """Run the whole eigen pipeline on an assembled resultant matrix."""
    stack = assemble(oc, m)
    schur = partition_and_schur(stack, opts.cond_threshold, opts.whole_matrix)
    a = schur.a_coeffs
    if len(a) < 2:
        raise NumericError("matrix polynomial does not depend on x0")
    transform, coeffs, kappa = rank_balance(a, opts.tries, opts.seed, opts.cond_threshold)
    r, d = schur.r, len(a) - 1
    # (alpha, beta, eigenvector block): eigenvalue alpha/beta
    raw: list[tuple[complex, complex, np.ndarray | None]] = []
    if kappa <= opts.cond_threshold:
        path = "companion"
        for pair in eigen(companion(coeffs)):
            mu = pair.value
            raw.append((transform.t1 * mu + transform.t2, transform.t3 * mu + transform.t4, pair.vector[:r]))
    else:
        path = "pencil"
        c1, c0 = pencil(a)
        for pair in generalized_eigen(c1, c0):
            raw.append((pair.alpha, pair.beta, None if pair.degenerate else pair.vector[:r]))

    n_finite = finite_eigen_count(m, opts.seed)
    infinite = _infinite_mask(raw, n_finite)
    lams = [complex("inf") if inf else a_ / b_ for (a_, b_, _), inf in zip(raw, infinite)]
    csize = _clusters(lams, opts.cluster_tol)
    columns = m.columns
    cands = []
    counts = {"finite_real": 0, "complex": 0, "infinite": 0}
    for (alpha, beta, vec), lam, inf, cs in zip(raw, lams, infinite, csize):
        ab = (complex(alpha), complex(beta))
        if inf:
            counts["infinite"] += 1
            cands.append(RootCandidate(lam, None, None, "infinite", True, ab))
            continue
        real = is_real(lam)
        counts["finite_real" if real else "complex"] += 1
        if vec is None:
            cands.append(RootCandidate(lam, None, None, "degenerate", real, ab, note="singular pencil"))
            continue
        if cs > 1:
            cands.append(RootCandidate(lam, None, None, "multiple", real, ab,
                                       note=f"eigenvalue of multiplicity {cs}; coordinates unreliable"))
            continue
        full = schur.back_substitute(lam, vec)
        coords = recover_monomials(columns, full)
        if coords is None:
            cands.append(RootCandidate(lam, None, None, "degenerate", real, ab, note="zero denominator"))
            continue
        point = _assemble_point(oc, lam, coords)
        res = normalized_residuals(oc.polys, point[1:] if oc.mode == "u" else coords, lam)
        cand = RootCandidate(lam, point, res, "rejected", real, ab, raw_point=point.copy(), raw_residuals=res)
        if cand.max_residual < opts.accept:
            _refine(oc, cand, opts)
        cands.append(cand)
    return SolveReport(cands, path, r, d, transform, kappa, counts,
                       partition="whole-matrix" if schur.whole_matrix else "schur", n_finite=n_finite,
                       schur=schur)


def _assemble_point(oc: OverconstrainedSystem, lam: complex, coords: np.ndarray) -> np.ndarray:
    if oc.mode == "u":
        return np.concatenate([[lam], coords])
    k = oc.hidden_index
    full = np.concatenate([coords[:k], [lam], coords[k:]])
    return np.concatenate([[lam], full])


def _refine(oc: OverconstrainedSystem, cand: RootCandidate, opts: SolveOptions) -> None:
    x = cand.point[1:]
    before = normalized_residuals(oc.square, x, None).max()
    y = newton_refine(oc.square, x, opts.newton_steps, opts.newton_tol)
    after = normalized_residuals(oc.square, y, None)
    if not np.all(np.isfinite(y)) or after.max() > max(10 * before, opts.accept):
        cand.status = "rejected"
        cand.note = "Newton refinement diverged"
        return
    if oc.mode == "u":
        lam = -sum(c * xi for c, xi in zip(oc.u_coeffs, y))
        lam = complex(lam)
    else:
        lam = y[oc.hidden_index]
    cand.point = np.concatenate([[lam], y])
    fx0 = [oc.polys[0](y, lam)] if oc.mode == "u" else []
    cand.residuals = np.concatenate([np.abs(fx0) / (oc.polys[0].max_coeff() if fx0 else 1), after])
    cand.status = "accepted"
