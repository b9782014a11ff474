"""Backend selection for the neighborhood scans.

The compiled extension is used when importable; set ``SONETLS_PURE_PYTHON=1``
to force the pure-Python fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
srap_scan = _kernels_py.srap_scan
idp_scan = _kernels_py.idp_scan

if os.environ.get("SONETLS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        srap_scan = _compiled.srap_scan
        idp_scan = _compiled.idp_scan


def backends() -> dict:
    """Every importable backend by name, for cross-checks and benchmarks."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        found["cython"] = _compiled
    return found
