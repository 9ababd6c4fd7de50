"""Sweep-kernel backend selection.

The compiled extension is preferred when it was built; otherwise the
pure-numpy kernels take over with identical semantics. ``get_backend`` exposes
both for cross-checking and benchmarking.
"""

from types import ModuleType

from . import _sweeps_py

try:
    from . import _sweeps as _compiled  # type: ignore[attr-defined]

    HAVE_COMPILED = True
except ImportError:
    _compiled = None
    HAVE_COMPILED = False

_active: ModuleType = _compiled if HAVE_COMPILED else _sweeps_py

BACKEND = "compiled" if HAVE_COMPILED else "python"

seq_sweep_kernel = _active.seq_sweep
seq_sweep_refresh_kernel = _active.seq_sweep_refresh
par_sweep_kernel = _active.par_sweep


def available_backends() -> list:
    """Names of the kernel backends importable in this environment."""
    return ["compiled", "python"] if HAVE_COMPILED else ["python"]


def get_backend(name: str) -> ModuleType:
    """Return the kernel module for ``name`` ('compiled' or 'python')."""
    if name == "python":
        return _sweeps_py
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled sweep kernels are not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
