"""Field containers and integral quantities.

A ScalarField wraps a (nx, ny) array of cell averages, a MacVectorField the
two staggered face arrays.  Norm helpers use the midpoint rule throughout:
integral(f) = sum(f) * dx * dy, which is what the conservation statements
elsewhere are phrased in.

Nonnegative fields coming out of the time steps may carry negatives at the
roundoff scale (bounded by ~1e-14 of the max).  Operations that require
nonnegativity (entropy, fractional powers) therefore flush negatives within
1e-12 of the field scale to zero and reject anything worse.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import TYPE_CHECKING, Callable

import numpy as np

if TYPE_CHECKING:
    from .grid import Grid

# relative size of negative values tolerated in nominally nonnegative fields
NEGATIVE_TOL = 1e-12


@dataclass
class ScalarField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(
                f"scalar field shape {self.values.shape} does not match grid "
                f"{(self.grid.nx, self.grid.ny)}")

    @classmethod
    def zeros(cls, grid: Grid) -> ScalarField:
        return cls(grid=grid, values=np.zeros(grid.shape))

    @classmethod
    def full(cls, grid: Grid, value: float) -> ScalarField:
        return cls(grid=grid, values=np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable) -> ScalarField:
        xc, yc = grid.center_mesh()
        return cls(grid=grid, values=np.asarray(fn(xc, yc), dtype=np.float64)
                   * np.ones(grid.shape))

    def copy(self) -> ScalarField:
        return ScalarField(grid=self.grid, values=self.values.copy())


@dataclass
class MacVectorField:
    """Staggered vector field: x on x-normal faces, y on y-normal faces."""

    grid: Grid
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        g = self.grid
        if self.x.shape != (g.nx + 1, g.ny) or self.y.shape != (g.nx, g.ny + 1):
            raise ValueError(
                f"face array shapes {self.x.shape}, {self.y.shape} do not match "
                f"grid ({g.nx + 1}, {g.ny}), ({g.nx}, {g.ny + 1})")

    @classmethod
    def zeros(cls, grid: Grid) -> MacVectorField:
        return cls(grid=grid, x=np.zeros((grid.nx + 1, grid.ny)),
                   y=np.zeros((grid.nx, grid.ny + 1)))

    def copy(self) -> MacVectorField:
        return MacVectorField(grid=self.grid, x=self.x.copy(), y=self.y.copy())

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(self.x))), float(np.max(np.abs(self.y))))

    def boundary_normal_max(self) -> float:
        """Largest boundary-normal face value; exactly 0.0 for no-slip fields."""
        return max(float(np.max(np.abs(self.x[0, :]))),
                   float(np.max(np.abs(self.x[-1, :]))),
                   float(np.max(np.abs(self.y[:, 0]))),
                   float(np.max(np.abs(self.y[:, -1]))))

    def center_magnitude(self) -> np.ndarray:
        """Cell-centered |v| from face-averaged components."""
        vxc = 0.5 * (self.x[:-1, :] + self.x[1:, :])
        vyc = 0.5 * (self.y[:, :-1] + self.y[:, 1:])
        return np.sqrt(vxc**2 + vyc**2)


def mac_from_streamfunction(grid: Grid, psi_nodes: np.ndarray) -> MacVectorField:
    """Discretely divergence-free field from a streamfunction on grid nodes.

    psi_nodes has shape (nx+1, ny+1); ux = d(psi)/dy, uy = -d(psi)/dx taken
    as exact differences along each face, so the discrete divergence
    telescopes to zero.  A psi vanishing on the boundary nodes gives zero
    boundary-normal faces (no-slip compatible construction for tests and
    manufactured solutions).
    """
    psi = np.asarray(psi_nodes, dtype=np.float64)
    if psi.shape != (grid.nx + 1, grid.ny + 1):
        raise ValueError(f"psi shape {psi.shape}, expected "
                         f"{(grid.nx + 1, grid.ny + 1)}")
    ux = (psi[:, 1:] - psi[:, :-1]) / grid.dy
    uy = -(psi[1:, :] - psi[:-1, :]) / grid.dx
    return MacVectorField(grid=grid, x=ux, y=uy)


@dataclass
class State:
    """Full simulation state at time t."""

    n: ScalarField
    c: ScalarField
    u: MacVectorField
    p: ScalarField
    t: float = 0.0

    def validate(self):
        grids = {id(self.n.grid), id(self.c.grid), id(self.u.grid), id(self.p.grid)}
        if len(grids) != 1:
            raise ValueError("state fields live on different grids")
        if self.t < 0.0:
            raise ValueError(f"time must be nonnegative, got {self.t}")
        for name, f in (("n", self.n), ("c", self.c)):
            v = f.values
            if v.size and np.isfinite(v).all():
                lo = float(v.min())
                scale = max(float(np.abs(v).max()), 1.0)
                if lo < -NEGATIVE_TOL * scale:
                    raise ValueError(
                        f"{name} must be nonnegative, min {lo:.3e} "
                        f"(tolerance {-NEGATIVE_TOL * scale:.3e})")


# ---------------------------------------------------------------------------
# integral quantities
# ---------------------------------------------------------------------------

def integral(field: ScalarField) -> float:
    """Midpoint-rule integral over the domain."""
    v = field.values
    if not np.isfinite(v).all():
        raise ValueError("integral of a field with non-finite entries")
    return float(v.sum()) * field.grid.cell_volume


def lp_norm(field: ScalarField, p: float) -> float:
    """L^p norm, p in [1, inf]."""
    v = field.values
    if not np.isfinite(v).all():
        raise ValueError("lp_norm of a field with non-finite entries")
    if p == np.inf:
        return float(np.abs(v).max())
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    return float((np.abs(v)**p).sum() * field.grid.cell_volume) ** (1.0 / p)


def grad_lp_norm(field: ScalarField, p: float) -> float:
    """L^p norm of |grad f|, with face gradients averaged back to centers.

    Boundary faces carry zero gradient (the zero-Neumann convention), so
    cells hugging a wall see half of the one-sided slope; on smooth fields
    this perturbs the norm by O(1/nx) near the walls only.
    """
    from .grid import gradient

    mag = gradient(field).center_magnitude()
    return lp_norm(ScalarField(grid=field.grid, values=mag), p)


def _checked_nonnegative(v: np.ndarray, what: str) -> np.ndarray:
    if not np.isfinite(v).all():
        raise ValueError(f"{what} of a field with non-finite entries")
    lo = float(v.min()) if v.size else 0.0
    if lo < 0.0:
        scale = max(float(np.abs(v).max()), 1.0)
        if lo < -NEGATIVE_TOL * scale:
            raise ValueError(
                f"{what} requires a nonnegative field, min {lo:.3e}")
        v = np.maximum(v, 0.0)
    return v


def entropy(field: ScalarField) -> float:
    """Integral of n log n with the 0 log 0 = 0 convention.

    Values below 1e-300 are treated as exact zeros to keep the logarithm
    away from the subnormal range.
    """
    v = _checked_nonnegative(field.values, "entropy")
    out = np.zeros_like(v)
    mask = v > 1e-300
    vm = v[mask]
    out[mask] = vm * np.log(vm)
    return float(out.sum()) * field.grid.cell_volume
