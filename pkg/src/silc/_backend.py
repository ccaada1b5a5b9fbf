"""Kernel selection: compiled core when importable, numpy otherwise.

Set ``SILC_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

if os.environ.get("SILC_PURE_PYTHON"):
    kernels = _fallback
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        kernels = _fallback

NAME = "compiled" if kernels is not _fallback else "numpy"


def available():
    """Names of the backends that can be imported in this environment."""
    names = ["numpy"]
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return names
    return ["compiled"] + names


def get(name):
    if name == "numpy":
        return _fallback
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
