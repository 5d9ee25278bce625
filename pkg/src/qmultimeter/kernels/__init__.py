"""Hot loops with a compiled backend and a numpy fallback.

The Cython module ``_core`` is used when it was built and importable.
Setting ``QMM_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _fallback

BACKEND = "python"
if not os.environ.get("QMM_PURE_PYTHON"):
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
else:
    _impl = _fallback

accumulate_product_outer = _impl.accumulate_product_outer
swap_test_p0_batch = _impl.swap_test_p0_batch

__all__ = ["BACKEND", "accumulate_product_outer", "swap_test_p0_batch"]
