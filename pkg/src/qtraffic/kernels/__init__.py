"""Hot kernels, compiled when available.

The Cython extension ``_core`` is used if it was built; otherwise the numpy
reference in ``_fallback`` is used.  Set ``QTRAFFIC_PURE=1`` to force the
fallback.  Both backends produce identical results.
"""
import os

from . import _fallback

BACKEND = "python"
_impl = _fallback
if os.environ.get("QTRAFFIC_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback


def backend(name: str | None = None):
    """Return the kernel module by name (``"python"``/``"cython"``), default active."""
    if name is None:
        return _impl
    if name == "python":
        return _fallback
    if name == "cython":
        from . import _core

        return _core
    raise ValueError(f"unknown kernel backend {name!r}")


slice_layers = _impl.slice_layers
refine = _impl.refine
teleport_ops = _impl.teleport_ops
asap = _impl.asap
fill_trace = _impl.fill_trace

__all__ = ["BACKEND", "backend", "slice_layers", "refine", "teleport_ops", "asap", "fill_trace"]
