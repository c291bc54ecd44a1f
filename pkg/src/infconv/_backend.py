"""Kernel backend selection.

The compiled Cython kernels are used when the extension was built; the
NumPy fallback is used otherwise, or when ``INFCONV_PURE_PYTHON`` is set to
a non-empty value other than ``0``.
"""

import os

from . import _kernels_py

_compiled = None
try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def available() -> list[str]:
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def get(name: str | None = None):
    """Kernel module for ``name`` (``"cython"``, ``"python"`` or ``None`` for the default)."""
    if name is None:
        name = BACKEND
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not available; rebuild with Cython")
        return _compiled
    if name == "python":
        return _kernels_py
    raise ValueError(f"unknown backend {name!r}")


def _default() -> str:
    if os.environ.get("INFCONV_PURE_PYTHON", "") not in ("", "0"):
        return "python"
    return "cython" if _compiled is not None else "python"


BACKEND = _default()
