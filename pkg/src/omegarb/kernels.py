"""Select the compiled elimination kernels, falling back to pure Python.

Set ``OMEGARB_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("OMEGARB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]

        _impl = _compiled
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        pass

bareiss_rank = _impl.bareiss_rank
sparse_echelon = _impl.sparse_echelon
rank_mod_p = _impl.rank_mod_p
rref_mod_p = _impl.rref_mod_p

__all__ = ["BACKEND", "bareiss_rank", "sparse_echelon", "rank_mod_p", "rref_mod_p"]
