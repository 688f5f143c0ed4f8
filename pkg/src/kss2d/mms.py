"""Manufactured-solution convergence studies for the three sub-equations.

Each study forces one operator with a source chosen so a smooth exact
solution is known, marches it on a sequence of grids, and reports the
final-time L2 error plus observed order between consecutive levels.

Design notes on the exact solutions:
  - diffusion: c = e^{-t} cos(pi x) cos(pi y) + 1.  Even about every
    wall, so the mirror ghost is exact and the observed order is clean.
  - transport: streamfunction A sin(pi x) sin(pi y) (velocity vanishes
    normal to the walls), density 2 + e^{-t} cos(pi x) cos(pi y).
    First-order upwind, dt proportional to h.
  - Stokes: streamfunction A sin^2(pi x) sin^2(pi y) times e^{-t}; the
    forcing g' u_s - g (lap u_s) is divergence free, so the exact
    pressure is zero.  Tangential components are odd about the walls,
    so the antisymmetric ghost is exact there too.

dt is tied to h^2 for the implicit studies and to h for the explicit
one, so the reported order is the spatial one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .fields import MacVectorField, ScalarField, mac_from_streamfunction
from .grid import Domain, Grid, build_grid
from .solvers import solve_helmholtz_cell, solve_viscous_x, solve_viscous_y
from .stokes import ProjectionConfig, helmholtz_project

_TOL = 1e-12
_MAXITER = 20000


@dataclass(frozen=True)
class MmsResult:
    case: str
    sizes: list[int]
    errors: list[float]
    orders: list[float]          # between consecutive levels
    order: float                 # mean slope across the whole sweep

    def table(self) -> str:
        lines = [f"{self.case}:",
                 f"  {'n':>5s} {'L2 error':>12s} {'order':>7s}"]
        for k, (n, e) in enumerate(zip(self.sizes, self.errors)):
            o = f"{self.orders[k - 1]:7.3f}" if k else "      -"
            lines.append(f"  {n:5d} {e:12.4e} {o}")
        lines.append(f"  mean order {self.order:.3f}")
        return "\n".join(lines)


def _unit_grid(n: int) -> Grid:
    return build_grid(Domain(lx=1.0, ly=1.0), n, n)


def _zero_walls(psi: np.ndarray):
    """Clamp a node streamfunction that vanishes on the walls analytically."""
    psi[0, :] = 0.0
    psi[-1, :] = 0.0
    psi[:, 0] = 0.0
    psi[:, -1] = 0.0


def _l2(err: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(np.sum(err * err) * grid.cell_volume))


def _result(case: str, sizes: list[int], errors: list[float]) -> MmsResult:
    orders = [math.log2(errors[k - 1] / errors[k]) for k in range(1, len(errors))]
    mean = math.log2(errors[0] / errors[-1]) / (len(errors) - 1)
    return MmsResult(case=case, sizes=sizes, errors=errors,
                     orders=orders, order=mean)


# ---------------------------------------------------------------------------
# diffusion-reaction: c_t = lap c - c + S
# ---------------------------------------------------------------------------

def _diffusion_error(n: int, t_end: float = 0.05) -> float:
    g = _unit_grid(n)
    xc, yc = g.center_mesh()
    cc = np.cos(np.pi * xc) * np.cos(np.pi * yc)

    def exact(t):
        return math.exp(-t) * cc + 1.0

    def source(t):
        return 2.0 * np.pi ** 2 * math.exp(-t) * cc + 1.0

    dt = 0.25 * g.dx ** 2
    steps = max(1, math.ceil(t_end / dt))
    dt = t_end / steps
    c = exact(0.0)
    for k in range(1, steps + 1):
        rhs = c + dt * source(k * dt)
        c = solve_helmholtz_cell(1.0 + dt, dt, rhs, g, x0=c,
                                 tol=_TOL, maxiter=_MAXITER)
    return _l2(c - exact(t_end), g)


# ---------------------------------------------------------------------------
# transport: n_t + div(u n) = S with a fixed divergence-free velocity
# ---------------------------------------------------------------------------

def _transport_error(n: int, t_end: float = 0.5) -> float:
    g = _unit_grid(n)
    amp = 0.3 / np.pi
    xn, yn = np.meshgrid(g.x_faces(), g.y_faces(), indexing="ij")
    psi = amp * np.sin(np.pi * xn) * np.sin(np.pi * yn)
    _zero_walls(psi)          # sin(pi) is not exactly 0 in floats
    u = mac_from_streamfunction(g, psi)
    umax = u.max_abs()

    xc, yc = g.center_mesh()
    cc = np.cos(np.pi * xc) * np.cos(np.pi * yc)
    sx = np.sin(np.pi * xc)
    sy = np.sin(np.pi * yc)
    cx = np.cos(np.pi * xc)
    cy = np.cos(np.pi * yc)
    # u . grad n for the exact fields; div u = 0 makes this the flux term
    spatial = amp * np.pi ** 2 * (cx * cx * sy * sy - sx * sx * cy * cy)

    def exact(t):
        return 2.0 + math.exp(-t) * cc

    def source(t):
        return math.exp(-t) * (spatial - cc)

    dt = 0.4 * min(g.dx, g.dy) / umax
    steps = max(1, math.ceil(t_end / dt))
    dt = t_end / steps
    zero_c = np.zeros(g.shape)
    f = exact(0.0)
    for k in range(steps):
        fstar, _, _ = K.transport_nstar(f, zero_c, u.x, u.y, g.dx, g.dy, dt)
        f = fstar + dt * source(k * dt)
    return _l2(f - exact(t_end), g)


# ---------------------------------------------------------------------------
# Stokes: u_t = lap u + F, div u = 0, no-slip
# ---------------------------------------------------------------------------

def _stokes_error(n: int, t_end: float = 0.02) -> float:
    g = _unit_grid(n)
    amp = 0.1
    pi = np.pi

    # exact velocity at faces
    xfx, yfx = np.meshgrid(g.x_faces(), g.y_centers(), indexing="ij")
    xfy, yfy = np.meshgrid(g.x_centers(), g.y_faces(), indexing="ij")
    uxs = amp * pi * np.sin(pi * xfx) ** 2 * np.sin(2.0 * pi * yfx)
    uys = -amp * pi * np.sin(2.0 * pi * xfy) * np.sin(pi * yfy) ** 2
    lap_uxs = amp * pi * np.sin(2.0 * pi * yfx) * (
        2.0 * pi ** 2 * np.cos(2.0 * pi * xfx)
        - 4.0 * pi ** 2 * np.sin(pi * xfx) ** 2)
    lap_uys = -amp * pi * np.sin(2.0 * pi * xfy) * (
        2.0 * pi ** 2 * np.cos(2.0 * pi * yfy)
        - 4.0 * pi ** 2 * np.sin(pi * yfy) ** 2)
    # wall-normal faces are pinned dofs, never forced
    for a in (uxs, lap_uxs):
        a[0, :] = 0.0
        a[-1, :] = 0.0
    for a in (uys, lap_uys):
        a[:, 0] = 0.0
        a[:, -1] = 0.0

    xn, yn = np.meshgrid(g.x_faces(), g.y_faces(), indexing="ij")
    psi = amp * np.sin(pi * xn) ** 2 * np.sin(pi * yn) ** 2
    _zero_walls(psi)
    u = mac_from_streamfunction(g, psi)   # g(0) = 1

    dt = 0.25 * g.dx ** 2
    steps = max(1, math.ceil(t_end / dt))
    dt = t_end / steps
    pcfg = ProjectionConfig(dt=dt, poisson_tol=_TOL, max_iter=_MAXITER)
    q_prev = None
    for k in range(1, steps + 1):
        gk = math.exp(-k * dt)
        ux1 = solve_viscous_x(dt, u.x, g, x0=u.x, tol=_TOL, maxiter=_MAXITER)
        uy1 = solve_viscous_y(dt, u.y, g, x0=u.y, tol=_TOL, maxiter=_MAXITER)
        fx = -gk * uxs - gk * lap_uxs
        fy = -gk * uys - gk * lap_uys
        ustar = MacVectorField(grid=g, x=ux1 + dt * fx, y=uy1 + dt * fy)
        u, q_prev = helmholtz_project(ustar, pcfg, q0=q_prev)
    ge = math.exp(-t_end)
    ex = u.x - ge * uxs
    ey = u.y - ge * uys
    return float(np.sqrt((np.sum(ex * ex) + np.sum(ey * ey)) * g.cell_volume))


def mms_convergence(levels: int = 3, base: int = 32) -> list[MmsResult]:
    """Run all three studies on grids base, 2 base, ... (levels of them)."""
    if levels < 3:
        raise ValueError(f"levels must be >= 3, got {levels}")
    if base < 8:
        raise ValueError(f"base grid must be >= 8, got {base}")
    sizes = [base * 2 ** k for k in range(levels)]
    out = []
    for case, fn in (("diffusion", _diffusion_error),
                     ("transport", _transport_error),
                     ("stokes", _stokes_error)):
        errors = [fn(s) for s in sizes]
        out.append(_result(case, sizes, errors))
    return out
