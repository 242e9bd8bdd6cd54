"""Exact lattice geometry: Newton polytopes, Minkowski sums, mixed subdivisions.

All arithmetic is done with Python integers and Fractions. The convex hull
routine is an incremental facet enumeration meant for small dimension and at
most a few hundred points, which is all the resultant constructions need.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import DimensionMismatchError, NonGenericLiftingError
from .exact import affine_rank, cramer_int, det_int, independent_rows, rank_frac, rank_int, solve_frac
from .polynomial import ExponentVector, Support

LIFT_MAX = 2**20
MAX_LIFT_ATTEMPTS = 10


# --------------------------------------------------------------------------
# convex hulls


@dataclass(frozen=True)
class Polytope:
    """Convex hull of a finite lattice point set.

    ``facets`` holds integer inequalities ``normal . x <= offset`` valid on
    the affine hull, expressed in the coordinates ``coords`` (a subset of the
    ambient coordinates onto which the affine hull projects injectively).
    ``equations`` are integer equalities ``normal . x == offset`` cutting out
    the affine hull in ambient space.
    """

    vertices: tuple[ExponentVector, ...]
    dimension: int
    ambient: int
    coords: tuple[int, ...] = ()
    facets: tuple[tuple[tuple[int, ...], int, frozenset], ...] = ()
    equations: tuple[tuple[tuple[int, ...], int], ...] = ()

    def project(self, p: Sequence) -> tuple:
        return tuple(p[j] for j in self.coords)

    def contains(self, p: Sequence, strict: bool = False) -> bool:
        """Membership of a rational point (relative interior if ``strict``)."""
        for nrm, off in self.equations:
            if sum(a * b for a, b in zip(nrm, p)) != off:
                return False
        q = self.project(p)
        if self.dimension == 0:
            return True
        for nrm, off, _ in self.facets:
            v = sum(a * b for a, b in zip(nrm, q))
            if v > off or (strict and v == off):
                return False
        return True

    def translate(self, shift: Sequence[int]) -> "Polytope":
        return convex_hull([tuple(a + s for a, s in zip(v, shift)) for v in self.vertices])


def _hyperplane(points: Sequence[Sequence[int]]) -> tuple[int, ...] | None:
    """Integer normal of the hyperplane through k points in R^k (None if degenerate)."""
    k = len(points[0])
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    normal = []
    for j in range(k):
        minor = [[row[c] for c in range(k) if c != j] for row in diffs]
        normal.append((-1) ** j * det_int(minor))
    if not any(normal):
        return None
    g = 0
    for x in normal:
        g = math.gcd(g, x)
    return tuple(x // g for x in normal)


def _full_dim_hull(points: list[tuple[int, ...]]) -> tuple[list[int], list[tuple[tuple[int, ...], int, frozenset]]]:
    """Hull of full-dimensional points in R^k, k >= 2.

    Returns (vertex indices, facets) with facets as (outer normal, offset,
    frozenset of indices of points lying on the facet).
    """
    k = len(points[0])
    m = len(points)
    order = sorted(range(m), key=lambda i: points[i])
    # initial simplex
    simplex = [order[0]]
    for i in order[1:]:
        if affine_rank([points[j] for j in simplex + [i]]) == len(simplex):
            simplex.append(i)
            if len(simplex) == k + 1:
                break
    centroid = [sum(points[i][c] for i in simplex) for c in range(k)]  # scaled by k+1
    scale = k + 1

    def oriented(nrm, base):
        off = sum(a * b for a, b in zip(nrm, points[base]))
        if sum(a * b for a, b in zip(nrm, centroid)) > off * scale:
            nrm = tuple(-x for x in nrm)
            off = -off
        return nrm, off

    current = list(simplex)
    facets: dict[tuple, tuple[tuple[int, ...], int]] = {}
    for drop in simplex:
        face = [i for i in simplex if i != drop]
        nrm = _hyperplane([points[i] for i in face])
        nrm, off = oriented(nrm, face[0])
        facets[nrm + (off,)] = (nrm, off)

    def on_facet(nrm, off, idx):
        return sum(a * b for a, b in zip(nrm, points[idx])) == off

    rest = [i for i in order if i not in simplex]
    # farthest-first style ordering keeps insertions rare
    rest.sort(key=lambda i: -sum(abs(scale * points[i][c] - centroid[c]) for c in range(k)))
    for p in rest:
        visible = [key for key, (nrm, off) in facets.items()
                   if sum(a * b for a, b in zip(nrm, points[p])) > off]
        if not visible:
            continue
        horizon = set()
        for key in visible:
            nrm, off = facets[key]
            horizon.update(i for i in current if on_facet(nrm, off, i))
        for key in visible:
            del facets[key]
        current.append(p)
        hz = sorted(horizon)
        for sub in itertools.combinations(hz, k - 1):
            nrm = _hyperplane([points[p]] + [points[i] for i in sub])
            if nrm is None:
                continue
            off = sum(a * b for a, b in zip(nrm, points[p]))
            vals = [sum(a * b for a, b in zip(nrm, points[i])) for i in current]
            if all(v <= off for v in vals):
                pass
            elif all(v >= off for v in vals):
                nrm = tuple(-x for x in nrm)
                off = -off
            else:
                continue
            facets.setdefault(nrm + (off,), (nrm, off))
        # drop points that stopped being vertices
        keep = []
        for i in current:
            normals = [nrm for nrm, off in facets.values() if on_facet(nrm, off, i)]
            if normals and rank_frac(normals) == k:
                keep.append(i)
        current = keep
    out = []
    for nrm, off in facets.values():
        on = frozenset(i for i in range(m) if on_facet(nrm, off, i))
        out.append((nrm, off, on))
    vertices = sorted(current, key=lambda i: points[i])
    return vertices, out


def convex_hull(points: Sequence[Sequence[int]]) -> Polytope:
    """Exact convex hull of integer points."""
    pts = sorted(set(tuple(int(x) for x in p) for p in points))
    if not pts:
        raise ValueError("empty point set")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise DimensionMismatchError("points of different lengths")
    p0 = pts[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in pts[1:]]
    dim = rank_frac(diffs) if diffs else 0
    # coordinates on which the affine hull projects injectively
    cols = independent_rows([[d[j] for d in diffs] for j in range(n)]) if diffs else []
    coords = tuple(cols[:dim])
    equations = _affine_equations(pts, diffs, n, dim)
    if dim == 0:
        return Polytope((p0,), 0, n, (), (), equations)
    proj = [tuple(p[j] for j in coords) for p in pts]
    if dim == 1:
        lo = min(range(len(pts)), key=lambda i: proj[i])
        hi = max(range(len(pts)), key=lambda i: proj[i])
        facets = (((-1,), -proj[lo][0], frozenset([lo])), ((1,), proj[hi][0], frozenset([hi])))
        verts = tuple(sorted([pts[lo], pts[hi]]))
        return Polytope(verts, 1, n, coords, _facets_to_points(facets, pts), equations)
    vidx, facets = _full_dim_hull(proj)
    return Polytope(tuple(pts[i] for i in vidx), dim, n, coords, _facets_to_points(facets, pts), equations)


def _facets_to_points(facets, pts):
    return tuple((nrm, off, frozenset(pts[i] for i in on)) for nrm, off, on in facets)


def _affine_equations(pts, diffs, n, dim):
    if dim == n:
        return ()
    # integer basis of the orthogonal complement of the direction space
    rows = [list(d) for d in diffs] if diffs else []
    basis = _nullspace_int(rows, n)
    return tuple((tuple(b), sum(x * y for x, y in zip(b, pts[0]))) for b in basis)


def _nullspace_int(rows: list[list[int]], n: int) -> list[list[int]]:
    a = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(a)) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][col]
        a[r] = [x / p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    out = []
    for fcol in free:
        v = [Fraction(0)] * n
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][fcol]
        den = 1
        for x in v:
            den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) for x in v])
    return out


def newton_polytope(s: Support | Sequence[Sequence[int]]) -> Polytope:
    """Newton polytope (exact vertex set) of a support."""
    pts = s.points if isinstance(s, Support) else s
    return convex_hull(pts)


def minkowski_sum(a: Polytope, b: Polytope) -> Polytope:
    if a.ambient != b.ambient:
        raise DimensionMismatchError(f"ambient dimensions differ: {a.ambient} vs {b.ambient}")
    return convex_hull({tuple(x + y for x, y in zip(p, q)) for p in a.vertices for q in b.vertices})


def minkowski_sum_all(polys: Sequence[Polytope]) -> Polytope:
    acc = polys[0]
    for p in polys[1:]:
        acc = minkowski_sum(acc, p)
    return acc


def _simplex_volume_scaled(simplex: Sequence[Sequence[int]]) -> int:
    p0 = simplex[0]
    return abs(det_int([[a - b for a, b in zip(p, p0)] for p in simplex[1:]]))


def pulling_triangulation(poly: Polytope) -> list[tuple[ExponentVector, ...]]:
    """Triangulate a full-dimensional polytope by recursive pulling."""
    if poly.dimension != poly.ambient:
        return []
    n = poly.ambient
    facet_sets = [frozenset(v for v in on if v in set(poly.vertices)) for _, _, on in poly.facets]
    if n == 1:
        return [tuple(poly.vertices)]

    def faces_of(face: frozenset, k: int) -> list[frozenset]:
        out = set()
        for f in facet_sets:
            g = face & f
            if len(g) >= k and g != face and affine_rank(sorted(g)) == k - 1:
                out.add(g)
        return list(out)

    def tri(face: frozenset, k: int) -> Iterator[tuple]:
        if k == 0:
            yield (next(iter(face)),)
            return
        v0 = min(face)
        for g in faces_of(face, k):
            if v0 in g:
                continue
            for s in tri(g, k - 1):
                yield (v0,) + s

    return list(tri(frozenset(poly.vertices), n))


def volume(poly: Polytope) -> Fraction:
    """Exact euclidean volume in the ambient space (0 if not full-dimensional)."""
    if poly.dimension < poly.ambient:
        return Fraction(0)
    tot = sum(_simplex_volume_scaled(s) for s in pulling_triangulation(poly))
    return Fraction(tot, math.factorial(poly.ambient))


def lattice_points(poly: Polytope, shift: Sequence[Fraction] | None = None) -> list[ExponentVector]:
    """Integer points of ``poly + shift`` by bounding-box enumeration."""
    n = poly.ambient
    shift = [Fraction(0)] * n if shift is None else [Fraction(s) for s in shift]
    lo = [math.ceil(min(v[j] for v in poly.vertices) + shift[j]) for j in range(n)]
    hi = [math.floor(max(v[j] for v in poly.vertices) + shift[j]) for j in range(n)]
    out = []
    for p in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        if poly.contains([x - s for x, s in zip(p, shift)]):
            out.append(tuple(p))
    return out


# --------------------------------------------------------------------------
# liftings and mixed subdivisions


@dataclass(frozen=True)
class Lifting:
    """Integer lifting values per support point."""

    values: tuple[dict, ...]
    seed: int

    def __call__(self, i: int, point: ExponentVector) -> int:
        return self.values[i][point]


def draw_lifting(supports: Sequence[Support], seed: int) -> Lifting:
    rng = random.Random(seed)
    vals = tuple({p: rng.randint(1, LIFT_MAX) for p in s.points} for s in supports)
    return Lifting(vals, seed)


@dataclass(frozen=True)
class Cell:
    """A fine cell F_0 + ... + F_m of a coherent mixed subdivision.

    ``normal_num / normal_den`` is the vector g such that (g, 1) is the inner
    normal of the lifted lower facet; ``height`` is the constant term of that
    facet, so the lower envelope above x is ``height - g . x`` on this cell.
    """

    summands: tuple[tuple[ExponentVector, ...], ...]
    volume: Fraction
    is_mixed: bool
    normal_num: tuple[int, ...] = field(repr=False, default=())
    normal_den: int = field(repr=False, default=1)
    height_num: int = field(repr=False, default=0)

    @property
    def types(self) -> tuple[int, ...]:
        return tuple(len(f) - 1 for f in self.summands)

    def vertex_summands(self) -> list[int]:
        return [i for i, f in enumerate(self.summands) if len(f) == 1]

    def envelope_scaled(self, x: Sequence[Fraction]) -> Fraction:
        """(height - g . x) * normal_den."""
        return self.height_num - sum(a * b for a, b in zip(self.normal_num, x))

    def barycentric(self, x: Sequence[Fraction]) -> list[list[Fraction]] | None:
        """Coefficients mu_ij with x = sum_i (a_i0 + sum_j mu_ij (a_ij - a_i0))."""
        base = [sum(f[0][c] for f in self.summands) for c in range(len(x))]
        edges = [[a - b for a, b in zip(p, f[0])] for f in self.summands for p in f[1:]]

        n = len(x)
        cols = [[edges[j][c] for j in range(len(edges))] for c in range(n)]
        sol = solve_frac(cols, [Fraction(x[c]) - base[c] for c in range(n)])
        if sol is None:
            return None
        out, k = [], 0
        for f in self.summands:
            out.append(sol[k:k + len(f) - 1])
            k += len(f) - 1
        return out

    def contains(self, x: Sequence[Fraction], strict: bool = True) -> bool:
        mu = self.barycentric(x)
        if mu is None:
            return False
        for group in mu:
            s = sum(group, Fraction(0))
            if strict:
                if any(m <= 0 for m in group) or s >= 1:
                    return False
            elif any(m < 0 for m in group) or s > 1:
                return False
        return True

    def __str__(self) -> str:
        faces = "|".join(" ".join(str(p) for p in f) for f in self.summands)
        return f"({faces}) {self.volume} {'mixed' if self.is_mixed else 'nonmixed'}"


@dataclass(frozen=True)
class MixedSubdivision:
    cells: tuple[Cell, ...]
    lifting: Lifting
    supports: tuple[Support, ...]

    @property
    def mixed_cells(self) -> tuple[Cell, ...]:
        return tuple(c for c in self.cells if c.is_mixed)

    def total_volume(self) -> Fraction:
        return sum((c.volume for c in self.cells), Fraction(0))

    def locate(self, x: Sequence[Fraction]) -> list[Cell]:
        """Cells maximizing the lower envelope at x (the cells containing x if x in Q)."""
        best = None
        winners: list[Cell] = []
        for c in self.cells:
            val = Fraction(c.envelope_scaled(x), c.normal_den)
            if best is None or val > best:
                best, winners = val, [c]
            elif val == best:
                winners.append(c)
        return winners

    def dump(self) -> str:
        return "\n".join(str(c) for c in self.cells)


def _enumerate_cells(supports: Sequence[Support], lift: Lifting, mixed_only: bool) -> list[Cell]:
    n = supports[0].n
    m = len(supports)
    pts = [list(s.points) for s in supports]
    lifts = [[lift(i, p) for p in pts[i]] for i in range(m)]
    cells: list[Cell] = []

    if mixed_only:
        if m != n:
            raise DimensionMismatchError("mixed cells of n polytopes need exactly n supports")
        type_choices = [tuple([1] * n)]
    else:
        type_choices = [t for t in itertools.product(range(n + 1), repeat=m) if sum(t) == n]

    for types in type_choices:
        if any(k + 1 > len(pts[i]) for i, k in enumerate(types)):
            continue
        choices = [list(itertools.combinations(range(len(pts[i])), k + 1)) for i, k in enumerate(types)]
        _search(0, [], [], choices, pts, lifts, types, n, cells, mixed_only)
    return cells


def _search(i, chosen, edges, choices, pts, lifts, types, n, cells, mixed_only):
    m = len(choices)
    if i == m:
        _check_cell(chosen, pts, lifts, types, n, cells, mixed_only)
        return
    for comb in choices[i]:
        base = pts[i][comb[0]]
        new_edges = [[a - b for a, b in zip(pts[i][j], base)] for j in comb[1:]]
        all_edges = edges + new_edges
        if new_edges and rank_int(all_edges) < len(all_edges):
            continue
        _search(i + 1, chosen + [comb], all_edges, choices, pts, lifts, types, n, cells, mixed_only)


def _check_cell(chosen, pts, lifts, types, n, cells, mixed_only):
    rows, rhs = [], []
    for i, comb in enumerate(chosen):
        a0 = pts[i][comb[0]]
        w0 = lifts[i][comb[0]]
        for j in comb[1:]:
            rows.append([a - b for a, b in zip(pts[i][j], a0)])
            rhs.append(-(lifts[i][j] - w0))
    den, num = cramer_int(rows, rhs)
    if den == 0:
        return
    if den < 0:
        den, num = -den, [-y for y in num]
    height = 0
    tie = False
    for i, comb in enumerate(chosen):
        inside = set(comb)
        vals = [sum(a * b for a, b in zip(p, num)) + den * w for p, w in zip(pts[i], lifts[i])]
        base = vals[comb[0]]
        for j, v in enumerate(vals):
            if v < base:
                return
            if v == base and j not in inside:
                tie = True
        height += base
    if tie:
        raise NonGenericLiftingError("lifting is not generic: lower facet with extra points")
    vol_scaled = abs(det_int(rows))
    fact = 1
    for k in types:
        fact *= math.factorial(k)
    summands = tuple(tuple(pts[i][j] for j in comb) for i, comb in enumerate(chosen))
    m = len(chosen)
    if m == n:
        mixed = all(k == 1 for k in types)
    else:
        mixed = sum(1 for k in types if k == 0) == m - n and all(k <= 1 for k in types)
    cells.append(Cell(summands, Fraction(vol_scaled, fact), mixed, tuple(num), den, height))


def mixed_subdivision(supports: Sequence[Support], lift: Lifting | None = None, seed: int = 0,
                      mixed_only: bool = False, check_volume: bool = True) -> MixedSubdivision:
    """Coherent fine mixed subdivision of the Minkowski sum of the supports' hulls.

    With an explicit ``lift`` a non-generic lifting raises
    NonGenericLiftingError. Without one, liftings are drawn from ``seed``,
    ``seed + 1``, ... up to MAX_LIFT_ATTEMPTS times.
    """
    supports = tuple(s if isinstance(s, Support) else Support(tuple(s)) for s in supports)
    if len({s.n for s in supports}) != 1:
        raise DimensionMismatchError("supports live in different dimensions")
    attempts = [lift] if lift is not None else [draw_lifting(supports, seed + t) for t in range(MAX_LIFT_ATTEMPTS)]
    last: Exception | None = None
    for lf in attempts:
        try:
            cells = _enumerate_cells(supports, lf, mixed_only)
            sub = MixedSubdivision(tuple(cells), lf, supports)
            if check_volume and not mixed_only:
                q = minkowski_sum_all([newton_polytope(s) for s in supports])
                if sub.total_volume() != volume(q):
                    raise NonGenericLiftingError("cell volumes do not add up to the Minkowski sum volume")
            return sub
        except NonGenericLiftingError as exc:
            last = exc
    raise NonGenericLiftingError(f"non-generic lifting after {len(attempts)} attempt(s): {last}")


def mixed_volume(supports: Sequence[Support | Sequence[Sequence[int]]], seed: int = 0) -> int:
    """Mixed volume of n supports in n variables (sum of mixed-cell volumes)."""
    supports = [s if isinstance(s, Support) else Support(tuple(map(tuple, s))) for s in supports]
    n = supports[0].n
    if len(supports) != n:
        raise DimensionMismatchError(f"need {n} supports in {n} variables, got {len(supports)}")
    sub = mixed_subdivision(supports, seed=seed, mixed_only=True)
    mv = sum((c.volume for c in sub.cells), Fraction(0))
    assert mv.denominator == 1
    return int(mv)


def mv_deficient(supports: Sequence[Support | Sequence[Sequence[int]]], seed: int = 0) -> tuple[list[int], int]:
    """Mixed volumes MV_{-i} of the n+1 supports with the i-th one left out, and their sum."""
    supports = [s if isinstance(s, Support) else Support(tuple(map(tuple, s))) for s in supports]
    n = supports[0].n
    if len(supports) != n + 1:
        raise DimensionMismatchError(f"need {n + 1} supports, got {len(supports)}")
    mvs = [mixed_volume(supports[:i] + supports[i + 1:], seed=seed) for i in range(n + 1)]
    return mvs, sum(mvs)
