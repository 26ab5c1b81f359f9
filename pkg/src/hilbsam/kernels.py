"""Hot-loop kernels: compiled extension if it was built, numpy fallback otherwise.

Set ``HILBSAM_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("HILBSAM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

superadditive_scan = _impl.superadditive_scan
count_standard = _impl.count_standard
polytope_slice_sum = _impl.polytope_slice_sum

INT64_SAFE = 2**61

__all__ = ["BACKEND", "INT64_SAFE", "count_standard", "polytope_slice_sum", "superadditive_scan"]
