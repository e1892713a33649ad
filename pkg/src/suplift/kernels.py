"""Backend selection for the grid-oracle pair loops.

The compiled extension is used when it was built; otherwise the numpy
fallback with identical signatures.  Set ``SUPLIFT_PURE_PYTHON=1`` to force
the fallback.
"""

import os

from . import _kernels_py

BACKEND = "numpy"
affine_pair_max = _kernels_py.affine_pair_max
heisenberg_pair_max = _kernels_py.heisenberg_pair_max

if not os.environ.get("SUPLIFT_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        BACKEND = "cython"
        affine_pair_max = _compiled.affine_pair_max
        heisenberg_pair_max = _compiled.heisenberg_pair_max

__all__ = ["BACKEND", "affine_pair_max", "heisenberg_pair_max"]
