"""Kernel backend selection: compiled Cython core with a numpy fallback.

The compiled extension is preferred when importable; ``KWSPOT_KERNELS``
(``compiled`` or ``fallback``) forces a choice, which the benchmark and the
cross-backend tests rely on. Both backends produce bit-identical results.
"""

from __future__ import annotations

import os

from . import fallback

try:
    from . import compiled
except ImportError:
    compiled = None

_BACKENDS = {"fallback": fallback}
if compiled is not None:
    _BACKENDS["compiled"] = compiled

DEFAULT_BACKEND = "compiled" if compiled is not None else "fallback"


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_backend(name: str | None = None):
    """Resolve a backend module by name, env override, or default."""
    if name is None:
        name = os.environ.get("KWSPOT_KERNELS", DEFAULT_BACKEND)
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {available_backends()}"
        ) from None
