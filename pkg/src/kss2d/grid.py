"""Staggered (MAC) grid geometry and second-order discrete calculus.

Scalars (cell density, signal, pressure, potential) live at cell centers,
vector components live on cell faces: x-components on x-normal faces with
shape (nx+1, ny), y-components on y-normal faces with shape (nx, ny+1).
Arrays are indexed [i, j] with i the x index.

Boundary handling is ghost-cell based: mirror ghosts for zero-Neumann
scalars, antisymmetric ghosts for homogeneous Dirichlet.  The
divergence/gradient pair below is an exact discrete adjoint (summation by
parts holds to roundoff), which the pressure projection and the mass
conservation guarantees rely on.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .fields import MacVectorField, ScalarField


class BoundaryKind(Enum):
    # zero normal derivative, mirror ghosts (density, signal)
    NEUMANN_ZERO = "neumann-zero"
    # zero boundary value, antisymmetric ghosts (velocity components)
    DIRICHLET_ZERO = "dirichlet-zero"


@dataclass(frozen=True)
class Domain:
    """Rectangle (0, lx) x (0, ly).  Convex by construction."""

    lx: float
    ly: float

    def __post_init__(self):
        if not (np.isfinite(self.lx) and self.lx > 0.0):
            raise ValueError(f"domain extent lx must be positive, got {self.lx}")
        if not (np.isfinite(self.ly) and self.ly > 0.0):
            raise ValueError(f"domain extent ly must be positive, got {self.ly}")

    @property
    def area(self) -> float:
        return self.lx * self.ly


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid over a Domain.

    Cell centers sit at x_i = (i + 1/2) dx, y_j = (j + 1/2) dy.
    """

    domain: Domain
    nx: int
    ny: int
    dx: float
    dy: float

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy

    def x_centers(self) -> np.ndarray:
        return (np.arange(self.nx) + 0.5) * self.dx

    def y_centers(self) -> np.ndarray:
        return (np.arange(self.ny) + 0.5) * self.dy

    def x_faces(self) -> np.ndarray:
        return np.arange(self.nx + 1) * self.dx

    def y_faces(self) -> np.ndarray:
        return np.arange(self.ny + 1) * self.dy

    def center_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-center coordinate arrays of shape (nx, ny)."""
        return np.meshgrid(self.x_centers(), self.y_centers(), indexing="ij")


def build_grid(domain: Domain, nx: int, ny: int) -> Grid:
    """Construct a grid, rejecting degenerate resolutions.

    Cell counts below 4 leave no interior for the one-sided boundary
    stencils, so they are refused outright.
    """
    if not isinstance(nx, (int, np.integer)) or not isinstance(ny, (int, np.integer)):
        raise ValueError(f"cell counts must be integers, got nx={nx!r}, ny={ny!r}")
    if nx < 4 or ny < 4:
        raise ValueError(f"cell counts must be >= 4, got nx={nx}, ny={ny}")
    return Grid(domain=domain, nx=int(nx), ny=int(ny),
                dx=domain.lx / nx, dy=domain.ly / ny)


# ---------------------------------------------------------------------------
# discrete calculus
# ---------------------------------------------------------------------------

def gradient(field: ScalarField) -> MacVectorField:
    """Face-centered gradient of a cell-centered scalar.

    Interior faces take the difference of the adjacent centers; boundary
    faces are zero, the flux convention for zero-Neumann scalars.
    """
    from .fields import MacVectorField

    f = field.values
    g = field.grid
    gx = np.zeros((g.nx + 1, g.ny))
    gy = np.zeros((g.nx, g.ny + 1))
    gx[1:-1, :] = (f[1:, :] - f[:-1, :]) / g.dx
    gy[:, 1:-1] = (f[:, 1:] - f[:, :-1]) / g.dy
    return MacVectorField(grid=g, x=gx, y=gy)


def divergence(field: MacVectorField) -> ScalarField:
    """Cell-centered divergence: net outward face flux per cell volume."""
    from .fields import ScalarField

    g = field.grid
    vx, vy = field.x, field.y
    d = (vx[1:, :] - vx[:-1, :]) / g.dx + (vy[:, 1:] - vy[:, :-1]) / g.dy
    return ScalarField(grid=g, values=d)


def laplacian(field: ScalarField, bc: BoundaryKind) -> ScalarField:
    """Five-point Laplacian under the requested boundary treatment.

    The Neumann form is literally divergence(gradient(f)) so the discrete
    identity between the three operators holds bitwise.  The Dirichlet form
    uses antisymmetric ghosts: the wall value, half a cell outside the first
    center, is zero.
    """
    from .fields import ScalarField

    if bc == BoundaryKind.NEUMANN_ZERO:
        return divergence(gradient(field))
    if bc != BoundaryKind.DIRICHLET_ZERO:
        raise ValueError(f"unsupported boundary kind: {bc!r}")

    f = field.values
    g = field.grid
    p = np.pad(f, 1, mode="edge")
    # antisymmetric ghosts: ghost = -first interior value
    p[0, :] *= -1.0
    p[-1, :] *= -1.0
    p[:, 0] *= -1.0
    p[:, -1] *= -1.0
    lap = ((p[2:, 1:-1] - 2.0 * f + p[:-2, 1:-1]) / g.dx**2
           + (p[1:-1, 2:] - 2.0 * f + p[1:-1, :-2]) / g.dy**2)
    return ScalarField(grid=g, values=lap)


def _d1(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    """First derivative at centers: centered inside, one-sided at the edges."""
    d = np.empty_like(f)
    if axis == 0:
        d[1:-1, :] = (f[2:, :] - f[:-2, :]) / (2.0 * h)
        d[0, :] = (f[1, :] - f[0, :]) / h
        d[-1, :] = (f[-1, :] - f[-2, :]) / h
    else:
        d[:, 1:-1] = (f[:, 2:] - f[:, :-2]) / (2.0 * h)
        d[:, 0] = (f[:, 1] - f[:, 0]) / h
        d[:, -1] = (f[:, -1] - f[:, -2]) / h
    return d


def _d2(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Second derivative at centers: centered inside, one-sided at the edges.

    The one-sided stencil reuses the centered one shifted by a cell, so it
    is exact for quadratics.
    """
    d = np.empty_like(f)
    if axis == 0:
        d[1:-1, :] = (f[2:, :] - 2.0 * f[1:-1, :] + f[:-2, :]) / h**2
        d[0, :] = (f[2, :] - 2.0 * f[1, :] + f[0, :]) / h**2
        d[-1, :] = (f[-1, :] - 2.0 * f[-2, :] + f[-3, :]) / h**2
    else:
        d[:, 1:-1] = (f[:, 2:] - 2.0 * f[:, 1:-1] + f[:, :-2]) / h**2
        d[:, 0] = (f[:, 2] - 2.0 * f[:, 1] + f[:, 0]) / h**2
        d[:, -1] = (f[:, -1] - 2.0 * f[:, -2] + f[:, -3]) / h**2
    return d


def hessian_frobenius(field: ScalarField) -> ScalarField:
    """Pointwise Frobenius norm of the Hessian, sqrt(fxx^2 + 2 fxy^2 + fyy^2).

    In the interior fxx + fyy reproduces the five-point Laplacian exactly,
    which makes |lap f| <= sqrt(2) |D2 f| an exact cellwise inequality there.
    """
    from .fields import ScalarField

    f = field.values
    g = field.grid
    fxx = _d2(f, 0, g.dx)
    fyy = _d2(f, 1, g.dy)
    fxy = _d1(_d1(f, 0, g.dx), 1, g.dy)
    return ScalarField(grid=g,
                       values=np.sqrt(fxx**2 + 2.0 * fxy**2 + fyy**2))
