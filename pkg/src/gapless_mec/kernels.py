"""Kernel selection: compiled Cython core when importable, numpy fallback otherwise.

Set ``GAPLESS_MEC_PURE=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("GAPLESS_MEC_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

partition_costs = _impl.partition_costs
pair_cost_matrix = _impl.pair_cost_matrix
