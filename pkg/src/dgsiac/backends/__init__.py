"""Backend selection for the pointwise physics kernels.

The compiled extension (_core, Cython) is preferred when importable; the
pure-numpy module is the fallback.  Set DGSIAC_BACKEND=python or
DGSIAC_BACKEND=cython to force a choice (forcing cython raises if the
extension is missing).
"""

from __future__ import annotations

import os

from . import py_kernels

_requested = os.environ.get("DGSIAC_BACKEND", "").strip().lower()

if _requested in ("", "auto", "cython"):
    try:
        from . import _core as _impl
        BACKEND_NAME = "cython"
    except ImportError:
        if _requested == "cython":
            raise ImportError(
                "DGSIAC_BACKEND=cython requested but the compiled extension "
                "is not available; build it or unset the variable")
        _impl = py_kernels
        BACKEND_NAME = "python"
elif _requested == "python":
    _impl = py_kernels
    BACKEND_NAME = "python"
else:
    raise ImportError(f"unknown DGSIAC_BACKEND value {_requested!r}; "
                      "use 'cython' or 'python'")

euler_flux = _impl.euler_flux
euler_speed = _impl.euler_speed
euler_lf = _impl.euler_lf
euler_pressure = _impl.euler_pressure
mhd_flux = _impl.mhd_flux
mhd_speed = _impl.mhd_speed
mhd_lf = _impl.mhd_lf
mhd_pressure = _impl.mhd_pressure
