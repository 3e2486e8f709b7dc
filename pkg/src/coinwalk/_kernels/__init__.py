"""Hot kernels with a numba path and a pure-NumPy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``COINWALK_DISABLE_NUMBA`` is unset or ``0``. :func:`set_backend`
switches at runtime; callers must look kernels up through this module
(``_kernels.kspace_traces``) so the switch takes effect.
"""
import importlib
import os

from . import _numpy

__all__ = ["BACKEND", "available_backends", "get_backend", "set_backend",
           "kspace_traces", "pure_step", "density_step"]

_KERNELS = ("kspace_traces", "pure_step", "density_step")


def available_backends() -> list[str]:
    names = ["numpy"]
    try:
        importlib.import_module(f"{__name__}._numba")
    except ImportError:
        return names
    return names + ["numba"]


def get_backend(name: str):
    if name == "numpy":
        return _numpy
    if name == "numba":
        return importlib.import_module(f"{__name__}._numba")
    raise ValueError(f"unknown kernel backend {name!r}")


def set_backend(name: str) -> None:
    global BACKEND
    mod = get_backend(name)
    g = globals()
    for fn in _KERNELS:
        g[fn] = getattr(mod, fn)
    BACKEND = name


BACKEND = "numpy"
kspace_traces = _numpy.kspace_traces
pure_step = _numpy.pure_step
density_step = _numpy.density_step

if os.environ.get("COINWALK_DISABLE_NUMBA", "0") in ("", "0") and "numba" in available_backends():
    set_backend("numba")
