"""Dense numeric kernel: pivoted LU, tiered solves, eigenproblems.

Backed by numpy/scipy (LAPACK). The LU here is hand-rolled because the
solver needs the pivot order and the conditioning of every leading block to
pick a well-conditioned constant block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import NumericError

DEFAULT_COND_THRESHOLD = 1e8
EIGEN_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class ConditionEstimate:
    kappa: float
    threshold: float = DEFAULT_COND_THRESHOLD

    @property
    def beyond(self) -> bool:
        return not np.isfinite(self.kappa) or self.kappa > self.threshold


def cond_inf(a: np.ndarray) -> float:
    """Infinity-norm condition number (inf for singular input)."""
    if a.size == 0:
        return 1.0
    try:
        inv = np.linalg.inv(a)
    except np.linalg.LinAlgError:
        return float("inf")
    k = np.linalg.norm(a, np.inf) * np.linalg.norm(inv, np.inf)
    return float(k) if np.isfinite(k) else float("inf")


@dataclass(frozen=True)
class LUFactorization:
    """``A[row_perm][:, col_perm] = L @ U`` for the leading ``rank`` pivots.

    ``L`` is unit lower triangular (m x k), ``U`` upper triangular (k x ncols).
    """

    a: np.ndarray
    L: np.ndarray
    U: np.ndarray
    row_perm: np.ndarray
    col_perm: np.ndarray
    rank: int
    condition: ConditionEstimate

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def nonsingular(self) -> bool:
        m, n = self.a.shape
        return m == n == self.rank

    def leading_block(self, k: int) -> np.ndarray:
        return self.L[:k, :k] @ self.U[:k, :k]

    def leading_condition(self, k: int) -> float:
        return cond_inf(self.leading_block(k))

    def pivot_growth(self) -> np.ndarray:
        """|U_11| / |U_kk| for every pivot, a cheap lower bound on leading-block conditioning."""
        d = np.abs(np.diag(self.U[: self.rank, : self.rank]))
        if d.size == 0:
            return d
        return d[0] / d


def lu_col_pivot(m: np.ndarray, threshold: float = DEFAULT_COND_THRESHOLD) -> LUFactorization:
    """LU with column pivoting (largest remaining column norm) and row pivoting inside it.

    Works on rectangular input. Stops at an exact zero pivot; ``rank`` then
    reports how many pivots were taken.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2:
        raise ValueError("matrix expected")
    rows, cols = a.shape
    work = a.copy()
    rp = np.arange(rows)
    cp = np.arange(cols)
    kmax = min(rows, cols)
    L = np.zeros((rows, kmax))
    rank = 0
    for k in range(kmax):
        sub = work[k:, k:]
        norms = np.linalg.norm(sub, axis=0)
        j = int(np.argmax(norms))
        if norms[j] == 0.0:
            break
        i = int(np.argmax(np.abs(sub[:, j])))
        j += k
        i += k
        work[:, [k, j]] = work[:, [j, k]]
        cp[[k, j]] = cp[[j, k]]
        work[[k, i]] = work[[i, k]]
        rp[[k, i]] = rp[[i, k]]
        L[[k, i]] = L[[i, k]]
        piv = work[k, k]
        factors = work[k + 1:, k] / piv
        L[k, k] = 1.0
        L[k + 1:, k] = factors
        work[k + 1:, k:] -= np.outer(factors, work[k, k:])
        rank = k + 1
    U = np.triu(work[:rank, :])
    L = L[:, :rank]
    if rows == cols == rank:
        kappa = cond_inf(a)
    else:
        kappa = float("inf")
    return LUFactorization(a, L, U, rp, cp, rank, ConditionEstimate(kappa, threshold))


@dataclass(frozen=True)
class TieredSolution:
    x: np.ndarray
    tier: str
    forward_error: float | None = None


def _split(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = 134217729.0 * a  # 2^27 + 1
    hi = c - (c - a)
    return hi, a - hi


def accurate_residual(a: np.ndarray, x: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``b - a @ x`` with error-free products and exactly rounded sums."""
    ah, al = _split(a)
    out = np.empty_like(b, dtype=float)
    for j in range(x.shape[1]):
        xh, xl = _split(x[:, j])
        p = a * x[:, j]
        err = ((ah * xh - p) + ah * xl + al * xh) + al * xl
        for i in range(a.shape[0]):
            out[i, j] = math.fsum(np.concatenate(([b[i, j]], -p[i], -err[i])))
    return out


def solve_tiered(fact: LUFactorization, b: np.ndarray, accuracy: str = "auto") -> TieredSolution:
    """Solve ``A X = B`` from a square nonsingular factorization.

    ``fast`` uses the triangular factors once. ``refined`` adds iterative
    refinement against the original matrix, with residuals accumulated
    exactly, and returns a forward error estimate. ``auto`` switches to ``refined`` when the condition estimate is
    beyond the factorization's threshold.
    """
    if not fact.nonsingular:
        raise NumericError(f"singular factorization (rank {fact.rank} of {fact.shape[0]})")
    if accuracy == "auto":
        accuracy = "refined" if fact.condition.beyond else "fast"
    if accuracy not in ("fast", "refined"):
        raise ValueError(f"unknown accuracy tier {accuracy!r}")
    b = np.asarray(b)
    vec = b.ndim == 1
    bb = b.reshape(b.shape[0], -1)

    def raw(rhs):
        y = sla.solve_triangular(fact.L, rhs[fact.row_perm], lower=True, unit_diagonal=True)
        z = sla.solve_triangular(fact.U, y, lower=False)
        out = np.empty_like(z)
        out[fact.col_perm] = z
        return out

    x = raw(bb.astype(np.result_type(bb, float)))
    ferr = None
    if accuracy == "refined":
        for _ in range(5):
            r = accurate_residual(fact.a, x, bb) if np.isrealobj(x) and np.isrealobj(bb) else bb - fact.a @ x
            dx = raw(r)
            x = x + dx
            nx = np.linalg.norm(x, np.inf)
            ferr = float(np.linalg.norm(dx, np.inf) / nx) if nx else 0.0
            if ferr < 1e-15:
                break
    return TieredSolution(x[:, 0] if vec else x, accuracy, ferr)


@dataclass(frozen=True)
class EigenPair:
    value: complex
    vector: np.ndarray
    residual: float
    converged: bool


def eigen(c: np.ndarray) -> list[EigenPair]:
    """All eigenpairs with unit-norm right eigenvectors.

    Pairs whose residual exceeds ``1e-8 * ||C|| * ||v||`` are kept but marked
    ``converged=False``.
    """
    c = np.asarray(c, dtype=float)
    if c.shape[0] != c.shape[1]:
        raise ValueError("square matrix expected")
    try:
        w, v = sla.eig(c)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from exc
    norm_c = max(np.linalg.norm(c, 2), np.finfo(float).tiny)
    out = []
    for k in range(w.size):
        vec = v[:, k] / np.linalg.norm(v[:, k])
        res = float(np.linalg.norm(c @ vec - w[k] * vec))
        out.append(EigenPair(complex(w[k]), vec, res, res <= EIGEN_RESIDUAL_TOL * norm_c))
    return out


@dataclass(frozen=True)
class GeneralizedEigenPair:
    alpha: complex
    beta: complex
    vector: np.ndarray
    infinite: bool
    degenerate: bool

    @property
    def value(self) -> complex:
        return self.alpha / self.beta if not self.infinite else complex("inf")


def generalized_eigen(c1: np.ndarray, c0: np.ndarray, inf_tol: float = 1e-10) -> list[GeneralizedEigenPair]:
    """Pairs (alpha, beta, v) with ``(alpha*C1 + beta*C0) v = 0``.

    The finite eigenvalue is ``alpha/beta``. ``infinite`` marks
    ``|beta| <= inf_tol * |alpha|``; ``degenerate`` marks alpha and beta both
    at roundoff level, i.e. a numerically identically singular pencil.
    """
    c1 = np.asarray(c1, dtype=float)
    c0 = np.asarray(c0, dtype=float)
    if c1.shape != c0.shape or c1.shape[0] != c1.shape[1]:
        raise ValueError("square matrices of equal size expected")
    try:
        w, v = sla.eig(-c0, c1, homogeneous_eigvals=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"generalized eigendecomposition failed: {exc}") from exc
    alpha, beta = w
    scale = max(np.linalg.norm(c1, 1), np.linalg.norm(c0, 1), np.finfo(float).tiny)
    eps = np.finfo(float).eps
    out = []
    for k in range(alpha.size):
        a, b = complex(alpha[k]), complex(beta[k])
        degenerate = abs(a) <= 10 * eps * scale and abs(b) <= 10 * eps * scale
        infinite = not degenerate and abs(b) <= inf_tol * abs(a)
        vec = v[:, k] / np.linalg.norm(v[:, k])
        out.append(GeneralizedEigenPair(a, b, vec, infinite, degenerate))
    return out
