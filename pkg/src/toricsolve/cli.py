"""Command line driver: ``toricsolve mv|matrix|solve SYSTEM_FILE``.

Reports are ``KEY: value`` lines on stdout. Everything except the ``TIME_``
lines is deterministic for a fixed seed.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from contextlib import contextmanager

import numpy as np

from .errors import ConstructionError, DimensionMismatchError, NonGenericLiftingError, NumericError, SystemFileError, ZeroPolynomialError
from .polytope import mixed_subdivision, mixed_volume, mv_deficient
from .resultant import build_incremental_matrix, build_subdivision_matrix, evaluation_error, load_matrix, store_matrix
from .solver import (
    OverconstrainedSystem,
    SolveOptions,
    build_regular_matrix,
    overconstrain,
    solve_roots,
    specialized_deficit,
)
from .sysfile import FIXTURES, SystemFile, fixture_path, load_system

EXIT_OK, EXIT_PARSE, EXIT_CONSTRUCTION, EXIT_NUMERIC = 0, 2, 3, 4


class Report:
    def __init__(self, out=None):
        self.out = out or sys.stdout

    def line(self, key: str, value) -> None:
        print(f"{key}: {value}", file=self.out)

    @contextmanager
    def timed(self, phase: str):
        t0 = time.perf_counter()
        yield
        self.line(f"TIME_{phase}", f"{time.perf_counter() - t0:.3f}s")


def fmt_complex(z: complex, digits: int = 10) -> str:
    z = complex(z)
    re_, im = round(z.real, digits) + 0.0, round(z.imag, digits) + 0.0
    if im == 0.0:
        return f"{re_:.{digits}g}"
    return f"{re_:.{digits}g}{im:+.{digits}g}i"


def fmt_point(p) -> str:
    return "(" + ", ".join(fmt_complex(z) for z in p) + ")"


def _system(args) -> SystemFile:
    path = fixture_path(args.system[1:]) if args.system.startswith("@") else args.system
    return load_system(path)


def _overconstrained(sf: SystemFile, args) -> OverconstrainedSystem | None:
    """Apply --u / --hide (or the file's defaults) to a square system."""
    if not sf.is_square:
        return None
    hide = args.hide if args.hide is not None else (None if args.u else sf.hide)
    if hide is not None:
        if not 1 <= hide <= sf.n:
            raise SystemFileError(f"--hide {hide} out of range 1..{sf.n}")
        return overconstrain(sf.polys, "hidden", hidden_index=hide - 1)
    return overconstrain(sf.polys, "u", seed=_seed(sf, args), u_coeffs=sf.u_coeffs)


def _seed(sf: SystemFile, args) -> int:
    if args.seed is not None:
        return args.seed
    return sf.seed if sf.seed is not None else 0


def _describe_mode(rep: Report, oc: OverconstrainedSystem) -> None:
    if oc.mode == "u":
        rep.line("MODE", "u-resultant")
        rep.line("UCOEF", " ".join(map(str, oc.u_coeffs)))
    else:
        rep.line("MODE", f"hidden x{oc.hidden_index + 1}")


def cmd_mv(args, rep: Report) -> int:
    sf = _system(args)
    seed = _seed(sf, args)
    rep.line("N", sf.n)
    rep.line("POLYNOMIALS", len(sf.polys))
    if sf.is_square:
        with rep.timed("mv"):
            sub = mixed_subdivision([f.support for f in sf.polys], seed=seed, mixed_only=True, check_volume=False)
        cells = sub.mixed_cells
        rep.line("MV", sum(int(c.volume) for c in cells))
        rep.line("MIXED_CELLS", len(cells))
        if args.cells:
            for k, c in enumerate(cells, 1):
                rep.line(f"CELL {k}", c)
    oc = _overconstrained(sf, args) if (args.u or args.hide is not None) else None
    polys = oc.polys if oc is not None else (sf.polys if not sf.is_square else None)
    if polys is not None:
        if oc is not None:
            _describe_mode(rep, oc)
        with rep.timed("mv_minus"):
            mvs, total = mv_deficient([f.support for f in polys], seed=seed)
        rep.line("MV_MINUS", " ".join(map(str, mvs)))
        rep.line("DEG_R", total)
    return EXIT_OK


def _matrix_for(oc_polys, oc, args, seed, rep: Report):
    if args.matrix_in:
        m = load_matrix(args.matrix_in, oc_polys)
        rep.line("MATRIX_SOURCE", "loaded")
        used = seed
        if oc is not None and specialized_deficit(m, seed):
            rep.line("WARNING", "loaded matrix is singular for these coefficients")
    elif oc is not None:
        m, used = build_regular_matrix(oc, args.algo, seed)
        rep.line("MATRIX_SOURCE", "built")
    else:
        builder = build_incremental_matrix if args.algo == "incremental" else build_subdivision_matrix
        m, used = builder(oc_polys, seed=seed), seed
        rep.line("MATRIX_SOURCE", "built")
    if args.matrix_out:
        store_matrix(m, args.matrix_out)
    return m, used


def _matrix_section(m, used_seed: int, rep: Report, algo: str, eval_seed: int) -> None:
    rep.line("ALGO", algo)
    rep.line("MATRIX_SEED", used_seed)
    rep.line("MATRIX_DIM", m.dim)
    rep.line("MATRIX_ROWS", " ".join(map(str, m.row_counts())))
    rep.line("MATRIX_X0_DEGREE", m.degree)
    rep.line("EVAL_CHECK", "pass" if evaluation_error(m, seed=eval_seed) <= 1e-10 else "FAIL")


def cmd_matrix(args, rep: Report) -> int:
    sf = _system(args)
    seed = _seed(sf, args)
    rep.line("N", sf.n)
    if sf.is_square:
        if not (args.u or args.hide is not None or sf.hide is not None or sf.u_coeffs is not None):
            raise DimensionMismatchError("square system: pass --u or --hide to add a polynomial")
        oc = _overconstrained(sf, args)
        _describe_mode(rep, oc)
        polys = oc.polys
    else:
        oc, polys = None, sf.polys
    with rep.timed("mv_minus"):
        mvs, total = mv_deficient([f.support for f in polys], seed=seed)
    rep.line("MV_MINUS", " ".join(map(str, mvs)))
    rep.line("DEG_R", total)
    with rep.timed("matrix"):
        m, used = _matrix_for(polys, oc, args, seed, rep)
    _matrix_section(m, used, rep, args.algo, seed)
    return EXIT_OK


def cmd_solve(args, rep: Report) -> int:
    sf = _system(args)
    if not sf.is_square:
        raise DimensionMismatchError(f"{len(sf.polys)} polynomials in {sf.n} variables: solve needs a square system")
    seed = _seed(sf, args)
    rep.line("N", sf.n)
    rep.line("SEED", seed)
    with rep.timed("mv"):
        mv = mixed_volume([f.support for f in sf.polys], seed=seed)
    rep.line("MV", mv)
    oc = _overconstrained(sf, args)
    _describe_mode(rep, oc)
    with rep.timed("matrix"):
        m, used = _matrix_for(oc.polys, oc, args, seed, rep)
    _matrix_section(m, used, rep, args.algo, seed)
    opts = SolveOptions(cond_threshold=args.cond, accept=args.accept, tries=args.tries, seed=seed,
                        whole_matrix=args.whole_matrix)
    with rep.timed("solve"):
        res = solve_roots(oc, m, opts)
    rep.line("PARTITION", res.partition)
    rep.line("M11_DIM", m.dim - res.r)
    rep.line("R", res.r)
    rep.line("D", res.d)
    t = res.transform
    rep.line("TRANSFORM", f"{t.t1} {t.t2} {t.t3} {t.t4}")
    rep.line("LEADING_KAPPA", f"{res.leading_kappa:.2e}")
    rep.line("PATH", res.path)
    rep.line("LINEARIZATION_DIM", res.r * res.d)
    rep.line("FINITE_EIGENVALUES", res.n_finite if res.n_finite is not None else "unknown (singular matrix)")
    c = res.counts
    rep.line("EIGEN_COUNTS", f"finite_real={c['finite_real']} complex={c['complex']} infinite={c['infinite']}")
    acc = sorted(res.accepted, key=lambda k: (not k.is_real, tuple(np.round(k.coordinates.real, 8)),
                                               tuple(np.round(k.coordinates.imag, 8))))
    rep.line("ACCEPTED", len(acc))
    rep.line("ACCEPTED_REAL", sum(1 for k in acc if k.is_real))
    for i, k in enumerate(acc, 1):
        coords = k.coordinates.real if k.is_real else k.coordinates
        rep.line(f"ROOT {i}", f"{'real' if k.is_real else 'complex'} x={fmt_point(coords)} "
                 f"residual={k.max_residual:.1e} raw_residual={k.raw_residuals.max():.1e}")
    mult = sorted(res.multiple, key=lambda k: (round(k.eigenvalue.real, 8), round(k.eigenvalue.imag, 8)))
    rep.line("MULTIPLE", len(mult))
    for i, k in enumerate(mult, 1):
        rep.line(f"MULTIPLE {i}", f"x0={fmt_complex(k.eigenvalue, 8)} {k.note}")
    rej = [k for k in res.candidates if k.status == "rejected" and k.residuals is not None]
    rep.line("REJECTED", len(rej))
    if rej:
        rep.line("MIN_REJECTED_RESIDUAL", f"{min(k.raw_residuals.max() for k in rej):.1e}")
    rep.line("DEGENERATE", sum(1 for k in res.candidates if k.status == "degenerate"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toricsolve", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log construction details to stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    sys_help = f"system file, or @name for a bundled one ({', '.join(sorted(FIXTURES))})"

    def common(p, overconstrain_flags=True):
        p.add_argument("system", help=sys_help)
        p.add_argument("--seed", type=int, default=None)
        if overconstrain_flags:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--u", action="store_true", help="add a random linear form (u-resultant)")
            g.add_argument("--hide", type=int, default=None, metavar="K", help="hide variable x_K (1-based)")

    p = sub.add_parser("mv", help="mixed volume and mixed cells")
    common(p)
    p.add_argument("--cells", action="store_true", help="list the mixed cells")
    p.set_defaults(func=cmd_mv)

    for name, func in (("matrix", cmd_matrix), ("solve", cmd_solve)):
        p = sub.add_parser(name, help="build a resultant matrix" if name == "matrix" else "solve a square system")
        common(p)
        p.add_argument("--algo", choices=("incremental", "subdivision"), default="incremental")
        p.add_argument("--matrix-in", "--load", dest="matrix_in", metavar="PATH")
        p.add_argument("--matrix-out", "--store", dest="matrix_out", metavar="PATH")
        if name == "solve":
            p.add_argument("--whole-matrix", action="store_true", help="skip the Schur complement, A = M")
            p.add_argument("--cond", type=float, default=1e8, help="condition threshold")
            p.add_argument("--accept", type=float, default=1e-4, help="residual acceptance threshold")
            p.add_argument("--tries", type=int, default=3, help="random rank-balancing transforms")
        p.set_defaults(func=func)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    rep = Report()
    try:
        return args.func(args, rep)
    except (SystemFileError, DimensionMismatchError, ZeroPolynomialError) as exc:
        print(f"ERROR[parse]: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConstructionError, NonGenericLiftingError) as exc:
        print(f"ERROR[construction]: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except NumericError as exc:
        print(f"ERROR[numeric]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
