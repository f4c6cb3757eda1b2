"""Backend selection for the hot Monte Carlo loop.

The compiled Cython kernel is preferred; the pure-numpy loop is the fallback
when the extension was not built or when HEAVYBALL_FORCE_PY is set.  Both
implement the same chunk protocol (see `_pyloop.hb_chunk`), consuming
pre-drawn Gaussian blocks so that a trial's noise stream is owned by its
numpy Generator regardless of backend.
"""
import os

from . import _pyloop

if os.environ.get("HEAVYBALL_FORCE_PY"):
    hb_chunk = _pyloop.hb_chunk
    BACKEND = "python"
else:
    try:
        from . import _fastloop

        hb_chunk = _fastloop.hb_chunk
        BACKEND = "cython"
    except ImportError:
        hb_chunk = _pyloop.hb_chunk
        BACKEND = "python"

__all__ = ["hb_chunk", "BACKEND", "_pyloop"]
