"""Backend dispatch for the hot kernels.

Two interchangeable implementations exist: kernels_numba (njit compiled) and
kernels_numpy (vectorized fallback).  The active one is chosen at import
time by the environment variable

    KSS2D_BACKEND = numba | numpy

defaulting to numba when importable.  Tests and the benchmark switch at
runtime via set_backend().
"""
from __future__ import annotations

import os

from . import kernels_numpy

try:
    from . import kernels_numba
    HAS_NUMBA = True
except ImportError:
    kernels_numba = None
    HAS_NUMBA = False

_FUNCTIONS = (
    "transport_nstar",
    "signal_cstar",
    "lap_cell_neumann",
    "cg_cell",
    "cg_facex",
    "cg_facey",
    "rbgs_sweep",
    "residual_cell",
    "restrict_fw",
    "prolong_add",
)

_active = None
_active_name = ""


def set_backend(name: str):
    """Select the kernel implementation: 'numba' or 'numpy'."""
    global _active, _active_name
    if name == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        _active = kernels_numba
    elif name == "numpy":
        _active = kernels_numpy
    else:
        raise ValueError(f"unknown backend {name!r}, expected 'numba' or 'numpy'")
    _active_name = name


def active_backend() -> str:
    return _active_name


_env = os.environ.get("KSS2D_BACKEND", "").strip().lower()
if _env in ("", "auto"):
    set_backend("numba" if HAS_NUMBA else "numpy")
else:
    set_backend(_env)


def __getattr__(name):
    if name in _FUNCTIONS:
        return getattr(_active, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
