"""Kernel backend selection.

The compiled extension is used when importable; set ``SBSBOUND_PURE_PYTHON=1``
to force the numpy fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("SBSBOUND_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

mgs = _impl.mgs
pvm_grid_objective = _impl.pvm_grid_objective

__all__ = ["BACKEND", "mgs", "pvm_grid_objective"]
