"""Kernel backend selection.

The compiled extension is preferred when importable; the pure Python
twin is the fallback. SWARMGUARD_BACKEND=pure|compiled forces a choice
(forcing "compiled" raises if the extension is unavailable).
"""

from __future__ import annotations

import os

from swarmguard._kernels import pure as _pure

_forced = os.environ.get("SWARMGUARD_BACKEND", "").strip().lower()

if _forced == "pure":
    _impl = _pure
elif _forced == "compiled":
    from swarmguard._kernels import _speed as _impl  # type: ignore[no-redef]
else:
    try:
        from swarmguard._kernels import _speed as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

adjacency_masks = _impl.adjacency_masks
reachable_mask = _impl.reachable_mask
route_lexmin = _impl.route_lexmin


def backend_name() -> str:
    return _impl.BACKEND


def get_backend(name: str):
    """Return a specific backend module by name, for parity tests."""
    if name == "pure":
        return _pure
    if name == "compiled":
        from swarmguard._kernels import _speed

        return _speed
    raise ValueError(f"unknown backend {name!r}")
