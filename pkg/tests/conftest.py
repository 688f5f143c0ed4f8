"""Shared builders for the test suite.

Random smooth scalars are low-order cosine series: cos(k pi x / lx) modes
are even about every wall at cell centers, so they satisfy the discrete
zero-flux condition exactly and are eigenfields of the five-point Neumann
Laplacian.  Random velocities come from streamfunctions clamped to zero on
the boundary nodes, so they are discretely divergence-free with exactly
zero boundary-normal faces.
"""
import numpy as np

from kss2d.fields import MacVectorField, ScalarField, mac_from_streamfunction
from kss2d.grid import Domain, Grid, build_grid


def unit_grid(nx: int, ny: int | None = None, lx: float = 1.0,
              ly: float = 1.0) -> Grid:
    return build_grid(Domain(lx=lx, ly=ly), nx, nx if ny is None else ny)


def neumann_eigenvalue(k: int, h: float, length: float) -> float:
    """Eigenvalue of -lap for the mode cos(k pi x / length), exact for the
    five-point stencil on spacing h (same formula for the sine modes)."""
    return (2.0 / h ** 2) * (1.0 - np.cos(k * np.pi * h / length))


def cosine_series(grid: Grid, rng: np.random.Generator, kmax: int = 3,
                  amp: float = 1.0, offset: float = 0.0) -> ScalarField:
    """Random superposition of Neumann-compatible cosine modes."""
    xc, yc = grid.center_mesh()
    lx, ly = grid.domain.lx, grid.domain.ly
    vals = np.full(grid.shape, float(offset))
    for k in range(kmax + 1):
        for l in range(kmax + 1):
            if k == 0 and l == 0:
                continue
            a = amp * rng.uniform(-1.0, 1.0) / (1 + k * k + l * l)
            vals += a * np.cos(k * np.pi * xc / lx) * np.cos(l * np.pi * yc / ly)
    return ScalarField(grid=grid, values=vals)


def positive_cosine_series(grid: Grid, rng: np.random.Generator,
                           kmax: int = 3, floor: float = 0.1) -> ScalarField:
    f = cosine_series(grid, rng, kmax=kmax, amp=0.5)
    f.values -= f.values.min()
    f.values += floor
    return f


def random_divfree(grid: Grid, rng: np.random.Generator, amp: float = 1.0,
                   kmax: int = 2) -> MacVectorField:
    """Discretely divergence-free MAC field, zero boundary-normal faces."""
    xn, yn = np.meshgrid(grid.x_faces(), grid.y_faces(), indexing="ij")
    lx, ly = grid.domain.lx, grid.domain.ly
    psi = np.zeros((grid.nx + 1, grid.ny + 1))
    for k in range(1, kmax + 1):
        for l in range(1, kmax + 1):
            a = amp * rng.uniform(-1.0, 1.0) / (k * k + l * l)
            psi += a * np.sin(k * np.pi * xn / lx) * np.sin(l * np.pi * yn / ly)
    # sin(k pi) is not exactly zero in floats; the wall nodes must be
    psi[0, :] = psi[-1, :] = 0.0
    psi[:, 0] = psi[:, -1] = 0.0
    return mac_from_streamfunction(grid, psi)


def interior_mac(grid: Grid, rng: np.random.Generator) -> MacVectorField:
    """Rough random face field, zero boundary-normal faces, not div-free."""
    vx = rng.standard_normal((grid.nx + 1, grid.ny))
    vy = rng.standard_normal((grid.nx, grid.ny + 1))
    vx[0, :] = vx[-1, :] = 0.0
    vy[:, 0] = vy[:, -1] = 0.0
    return MacVectorField(grid=grid, x=vx, y=vy)
