"""Reduction kernels with two interchangeable lanes.

At import time the compiled Cython core is preferred; if the extension is not
built the pure-numpy fallback takes over.  Both lanes implement the identical
floating-point operation order, so every number the package produces is
independent of the lane (and a test asserts bitwise agreement when both are
importable).  Selection is purely by import availability — no environment
variable changes it.
"""

from __future__ import annotations

from . import fallback

try:
    from . import _core as _impl
except ImportError:
    _impl = fallback

ordered_sum = _impl.ordered_sum
ordered_dot = _impl.ordered_dot
pompeiu_sum = _impl.pompeiu_sum
BLOCK = _impl.BLOCK


def backend_name() -> str:
    """Return which lane is active: ``"compiled"`` or ``"fallback"``."""
    return _impl.LANE


__all__ = [
    "BLOCK",
    "backend_name",
    "fallback",
    "ordered_dot",
    "ordered_sum",
    "pompeiu_sum",
]
