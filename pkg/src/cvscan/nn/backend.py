"""Kernel backend selection.

Two implementations of the hot numerical kernels exist: a compiled
extension (`cvscan.nn._kernels`, Cython over BLAS) and a pure-NumPy
fallback (`cvscan.nn.kernels_numpy`).  Both expose the same functions
with identical semantics; layer code always dispatches through the
module-level `KERNELS` so the choice is a single swap point.

Selection happens at import time from the CVSCAN_KERNELS environment
variable: "cython" or "numpy" force a backend, "auto" (the default)
prefers the compiled extension and silently falls back.
"""

from __future__ import annotations

import os
from types import ModuleType

ENV_VAR = "CVSCAN_KERNELS"
_CHOICES = ("auto", "cython", "numpy")


def select_backend(name: str = "auto") -> ModuleType:
    """Return the kernel module for `name`, raising if a forced choice
    is unavailable."""
    if name not in _CHOICES:
        raise ValueError(f"{ENV_VAR} must be one of {_CHOICES}, got {name!r}")
    if name in ("auto", "cython"):
        try:
            from . import _kernels

            return _kernels
        except ImportError:
            if name == "cython":
                raise ImportError(
                    "compiled kernels requested via CVSCAN_KERNELS=cython "
                    "but cvscan.nn._kernels is not built"
                ) from None
    from . import kernels_numpy

    return kernels_numpy


def backend_name(module: ModuleType) -> str:
    return "cython" if module.__name__.endswith("_kernels") else "numpy"


KERNELS: ModuleType = select_backend(os.environ.get(ENV_VAR, "auto"))
BACKEND_NAME: str = backend_name(KERNELS)


def use_backend(name: str) -> ModuleType:
    """Swap the active backend in place (mainly for tests/benchmarks)."""
    global KERNELS, BACKEND_NAME
    KERNELS = select_backend(name)
    BACKEND_NAME = backend_name(KERNELS)
    return KERNELS
