"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy/pure-Python ``_fallback`` module is used. Set ``BRICKQEC_PURE_PYTHON=1``
to force the fallback.
"""
import os

from brickqec import _fallback

if os.environ.get("BRICKQEC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from brickqec import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

gate_transfer = _impl.gate_transfer
apply_local_table = _impl.apply_local_table
enumerate_counts = _impl.enumerate_counts

# object-dtype (exact) vectors always go through numpy
gate_transfer_exact = _fallback.gate_transfer


def backends():
    """Mapping of available backend name to kernel module."""
    out = {"python": _fallback}
    try:
        from brickqec import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
