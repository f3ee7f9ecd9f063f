"""Integer matrix kernels with backend selection.

The compiled extension (cohomlab._kernel._speedups, built from
_speedups.pyx) is preferred; the pure-Python twin is used when the
extension is unavailable or when COHOMLAB_PURE=1 is set.  Both backends
implement the same algorithms with the same pivot choices, so results
are identical bit for bit.
"""

import os

from . import pure

if os.environ.get("COHOMLAB_PURE"):
    _impl = pure
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND
xgcd = _impl.xgcd
hnf_transform = _impl.hnf_transform
hnf_basis = _impl.hnf_basis
snf_transform = _impl.snf_transform
mat_mul = _impl.mat_mul

__all__ = [
    "BACKEND",
    "xgcd",
    "hnf_transform",
    "hnf_basis",
    "snf_transform",
    "mat_mul",
    "pure",
]
