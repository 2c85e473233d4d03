"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set BRJUNOKIT_BACKEND=numpy (or cython) to force a backend.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def available_backends() -> list:
    return ["numpy"] + (["cython"] if _compiled is not None else [])


def get_backend(name: str = "auto") -> SimpleNamespace:
    if name == "auto":
        name = "cython" if _compiled is not None else "numpy"
    if name == "cython":
        if _compiled is None:
            raise ImportError("the compiled kernels are not built")
        mod = _compiled
    elif name == "numpy":
        mod = _fallback
    else:
        raise ValueError(f"unknown backend {name!r}")
    return SimpleNamespace(name=name, iterate_disks=mod.iterate_disks, linearizer_series=mod.linearizer_series)


_active = get_backend(os.environ.get("BRJUNOKIT_BACKEND", "auto"))
BACKEND = _active.name
iterate_disks = _active.iterate_disks
linearizer_series = _active.linearizer_series
