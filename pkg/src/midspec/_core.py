"""Kernel backend selection.

The compiled extension is preferred; set ``MIDSPEC_PURE=1`` to force the
pure-Python kernels.
"""
import os

from . import _kernels_py

if os.environ.get("MIDSPEC_PURE", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

qp_eval = _impl.qp_eval
kummer_series = _impl.kummer_series
rk4_dde = _impl.rk4_dde
BACKEND = _impl.BACKEND
