"""Select compiled kernels when the extension is importable.

Set ``SI3_PURE=1`` to force the pure-Python fallbacks.
"""
import os

try:
    if os.environ.get("SI3_PURE"):
        raise ImportError("pure mode requested")
    from . import _kernels as _ext
    BACKEND = "cython"
except ImportError:
    _ext = None
    BACKEND = "python"


def configure(*args):
    """Forward shared constants to the extension, if loaded."""
    if _ext is not None:
        _ext.configure(*args)


def pick(*pairs):
    """pick(name1, fallback1, name2, fallback2, ...) -> tuple of callables."""
    out = []
    for name, fallback in zip(pairs[::2], pairs[1::2]):
        out.append(getattr(_ext, name, fallback) if _ext is not None else fallback)
    return tuple(out) if len(out) > 1 else out[0]
