"""Hot kernels with an optional compiled backend.

The compiled extension is used when present; otherwise the pure-Python
implementation in :mod:`crossedprod._core.pure` takes over.  Setting the
environment variable ``CROSSEDPROD_FORCE_PURE=1`` skips the extension even
when it is installed (useful for benchmarking and parity tests).
"""

import os

from . import pure

if os.environ.get("CROSSEDPROD_FORCE_PURE") == "1":
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

free_ball_words = _impl.free_ball_words
free_t_count = _impl.free_t_count
free_mul = pure.free_mul

__all__ = ["BACKEND", "free_ball_words", "free_t_count", "free_mul"]
