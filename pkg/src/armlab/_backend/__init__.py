"""Kernel backend selection.

The hot stepping kernels exist twice: a compiled Cython core (armlab._core)
and a pure numpy fallback with identical signatures. The compiled core is
preferred; set ARMLAB_BACKEND=python to force the fallback, or
ARMLAB_BACKEND=compiled to require the extension.
"""

import os

from . import fallback as _fallback

_requested = os.environ.get("ARMLAB_BACKEND", "auto").lower()

if _requested not in ("auto", "compiled", "python"):
    raise RuntimeError(f"unknown ARMLAB_BACKEND value: {_requested!r}")

_impl = None
if _requested in ("auto", "compiled"):
    try:
        from armlab import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "compiled":
            raise RuntimeError(
                "ARMLAB_BACKEND=compiled but armlab._core is not built"
            ) from None
if _impl is None:
    _impl = _fallback

active = _impl

strains = _impl.strains
accelerations = _impl.accelerations
contact_forces = _impl.contact_forces
energies = _impl.energies
step_block = _impl.step_block


def backend_name() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return "compiled" if _impl is not _fallback else "python"


def get_backend(name: str):
    """Fetch a specific backend module by name (for benchmarks/tests)."""
    if name == "python":
        return _fallback
    if name == "compiled":
        from armlab import _core  # raises ImportError when not built

        return _core
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from armlab import _core  # noqa: F401

        names.insert(0, "compiled")
    except ImportError:
        pass
    return names
