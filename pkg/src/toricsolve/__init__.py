"""Sparse elimination: mixed volumes, sparse resultant matrices, and an
eigenvalue solver for polynomial systems."""

from .errors import (
    ConstructionError,
    DimensionMismatchError,
    NonGenericLiftingError,
    NumericError,
    SupportMismatchError,
    SystemFileError,
    ToricError,
    ZeroPolynomialError,
)
from .polynomial import SparsePolynomial, Support, support_of
from .polytope import (
    Polytope,
    lattice_points,
    minkowski_sum,
    mixed_subdivision,
    mixed_volume,
    mv_deficient,
    newton_polytope,
    volume,
)
from .resultant import (
    ResultantMatrix,
    build_incremental_matrix,
    build_subdivision_matrix,
    evaluation_error,
    load_matrix,
    modular_rank,
    store_matrix,
)
from .solver import (
    OverconstrainedSystem,
    SolveOptions,
    SolveReport,
    build_regular_matrix,
    companion,
    overconstrain,
    pencil,
    partition_and_schur,
    rank_balance,
    solve_roots,
)
from .sysfile import SystemFile, load_fixture, load_system, loads_system

__all__ = [
    "ConstructionError",
    "DimensionMismatchError",
    "NonGenericLiftingError",
    "NumericError",
    "OverconstrainedSystem",
    "Polytope",
    "ResultantMatrix",
    "SolveOptions",
    "SolveReport",
    "SparsePolynomial",
    "Support",
    "SupportMismatchError",
    "SystemFile",
    "SystemFileError",
    "ToricError",
    "ZeroPolynomialError",
    "build_incremental_matrix",
    "build_regular_matrix",
    "build_subdivision_matrix",
    "companion",
    "evaluation_error",
    "lattice_points",
    "load_fixture",
    "load_matrix",
    "load_system",
    "loads_system",
    "minkowski_sum",
    "mixed_subdivision",
    "mixed_volume",
    "modular_rank",
    "mv_deficient",
    "newton_polytope",
    "overconstrain",
    "partition_and_schur",
    "pencil",
    "rank_balance",
    "solve_roots",
    "store_matrix",
    "support_of",
    "volume",
]
