"""Exact toolkit for Omega-family Rota-Baxter algebras.

Exact linear algebra, Omega-indexed multilinear maps, L-infinity brackets,
cohomology with long exact sequence checks, and truncated deformations.
"""

from __future__ import annotations

from .errors import *  # noqa: F401,F403
from .exactla import GF, QQ, SparseMatrix, field_from_name, quotient_dim, rank
from .kernels import BACKEND
from .omega_maps import FiniteSemigroup, MixedMultiMap, OmegaMultiMap
from .structures import AbsoluteRBSystem, AssAct, OmegaAlgebra, OmegaBimodule, RelativeRBSystem
from .cohomology import Complex, cohomology_dims, les_check

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "GF", "QQ", "SparseMatrix", "field_from_name", "quotient_dim", "rank",
    "FiniteSemigroup", "OmegaMultiMap", "MixedMultiMap",
    "OmegaAlgebra", "OmegaBimodule", "AssAct", "AbsoluteRBSystem", "RelativeRBSystem",
    "Complex", "cohomology_dims", "les_check",
]
