"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback
keeps everything working without a C toolchain. Set DQCLAB_BACKEND to
"cython" or "python" to force one (forcing "cython" raises if the
extension is missing).
"""

from __future__ import annotations

import os

_requested = os.environ.get("DQCLAB_BACKEND", "auto").strip().lower()

if _requested in ("auto", ""):
    try:
        from . import _kernels as _impl

        _name = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        _name = "python"
elif _requested == "cython":
    from . import _kernels as _impl

    _name = "cython"
elif _requested == "python":
    from . import _kernels_py as _impl

    _name = "python"
else:
    raise RuntimeError(
        f"DQCLAB_BACKEND must be 'auto', 'cython' or 'python', got {_requested!r}"
    )

run_ops = _impl.run_ops


def backend_name() -> str:
    """Name of the active kernel backend: 'cython' or 'python'."""
    return _name
