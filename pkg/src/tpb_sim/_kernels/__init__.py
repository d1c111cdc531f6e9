"""Hot-loop backends: a compiled kernel with a pure-Python fallback.

The default backend is picked at import time: the compiled kernel when its
extension module imports, the Python fallback otherwise. Set
``TPB_SIM_BACKEND=python`` or ``=cython`` to force one; forcing cython
raises if the extension is missing. Both backends consume the same RNG
substreams in the same order and produce bit-identical trajectories, so
which one runs is a pure speed question.
"""

from __future__ import annotations

import os

from . import _core_py


def get_kernel(name: str | None = None):
    """Kernel module by name; None returns the import-time default."""
    if name is None:
        return _default
    if name == "python":
        return _core_py
    if name == "cython":
        from . import _core_cy

        return _core_cy
    raise ValueError(f"unknown backend {name!r}; use 'cython' or 'python'")


def _load_default():
    requested = os.environ.get("TPB_SIM_BACKEND", "").strip().lower()
    if requested == "python":
        return _core_py
    if requested in ("", "cython"):
        try:
            from . import _core_cy

            return _core_cy
        except ImportError:
            if requested == "cython":
                raise
            return _core_py
    raise ValueError(
        f"unknown TPB_SIM_BACKEND {requested!r}; use 'cython' or 'python'"
    )


_default = _load_default()
BACKEND = _default.NAME
run_steps = _default.run_steps
