"""Pick the compiled kernels when available, else the pure-Python twins.

Set ``NULLCHARGE_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

if os.environ.get("NULLCHARGE_PURE_PYTHON", "") not in ("", "0"):
    kernels = _pykernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:  # extension not built
        kernels = _pykernels

NAME = "cython" if kernels is not _pykernels else "python"


def available():
    """All importable backends, keyed by name."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
