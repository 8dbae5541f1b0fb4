"""Kernel backend selection.

The compiled extension is preferred when importable; the NumPy fallback
is always available. Selection happens once at import and can be forced
with the environment variable WEHRLGME_BACKEND=compiled|python or at
runtime with set_backend().
"""

from __future__ import annotations

import os

from . import _core_py

try:
    from . import _core
except ImportError:
    _core = None

_BACKENDS = {"python": _core_py}
if _core is not None:
    _BACKENDS["compiled"] = _core

_active = _BACKENDS.get(os.environ.get("WEHRLGME_BACKEND", ""), None)
if _active is None:
    if os.environ.get("WEHRLGME_BACKEND"):
        raise ImportError(
            f"requested backend {os.environ['WEHRLGME_BACKEND']!r} is not "
            f"available (have: {sorted(_BACKENDS)})")
    _active = _BACKENDS.get("compiled", _core_py)


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def backend_name() -> str:
    return _active.NAME


def set_backend(name: str) -> None:
    """Switch kernels at runtime (mainly for tests and benchmarks)."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r} (have: {sorted(_BACKENDS)})")
    _active = _BACKENDS[name]


def kernels():
    """The active kernel module (permanent, husimi_many, husimi_max)."""
    return _active
