"""Stokes flow: implicit viscous step, buoyancy forcing, Leray projection.

Splitting per step: solve (I - dt lap) u* = u with no-slip walls, add
dt * n grad(phi), then project onto the discretely divergence-free space.
Adding the force after the viscous solve keeps any force that is a discrete
gradient (uniform buoyancy in particular) exactly absorbable by the
projection, so hydrostatic balance produces no spurious flow.

The projection solves lap q = div(u*) with zero-flux walls and subtracts
grad q; because divergence and gradient are exact adjoints, the remaining
divergence equals the Poisson residual and the projection is orthogonal, so
kinetic energy never grows across it.  The pressure is reported as
P = q / dt, mean-free.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError
from .fields import MacVectorField, ScalarField
from .grid import Grid, divergence, gradient
from .solvers import solve_poisson_neumann, solve_viscous_x, solve_viscous_y


@dataclass(frozen=True)
class ProjectionConfig:
    dt: float
    poisson_tol: float = 1e-12
    max_iter: int = 2000

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (0.0 < self.poisson_tol <= 1e-8):
            raise ValueError(
                f"poisson_tol must lie in (0, 1e-8], got {self.poisson_tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class Potential:
    """Gravitational-type potential: cell values plus precomputed face
    gradient (zero on boundary faces, like every face gradient here)."""

    phi: ScalarField
    grad_phi: MacVectorField

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> Potential:
        phi = ScalarField.from_function(grid, fn)
        return cls(phi=phi, grad_phi=gradient(phi))

    @classmethod
    def linear_y(cls, grid: Grid, g: float) -> Potential:
        return cls.from_callable(grid, lambda x, y: g * y)


def buoyancy(n: ScalarField, pot: Potential) -> MacVectorField:
    """Face force n grad(phi): density averaged to faces, gradient as
    stored.  Boundary faces carry no force."""
    nv = n.values
    gp = pot.grad_phi
    fx = np.zeros_like(gp.x)
    fy = np.zeros_like(gp.y)
    fx[1:-1, :] = 0.5 * (nv[:-1, :] + nv[1:, :]) * gp.x[1:-1, :]
    fy[:, 1:-1] = 0.5 * (nv[:, :-1] + nv[:, 1:]) * gp.y[:, 1:-1]
    return MacVectorField(grid=n.grid, x=fx, y=fy)


def helmholtz_project(v: MacVectorField, cfg: ProjectionConfig,
                      q0: ScalarField | None = None
                      ) -> tuple[MacVectorField, ScalarField]:
    """Split v into a divergence-free part and a gradient.

    Returns (v - grad q, q) with lap q = div v and q mean-free.  Boundary
    normal faces pass through untouched (grad q vanishes there).  q0 is an
    optional initial guess for the Poisson solve.
    """
    g = v.grid
    div = divergence(v).values
    q, _, _ = solve_poisson_neumann(div, g,
                                    q0.values if q0 is not None else None,
                                    tol=cfg.poisson_tol)
    qf = ScalarField(grid=g, values=q)
    gq = gradient(qf)
    return (MacVectorField(grid=g, x=v.x - gq.x, y=v.y - gq.y), qf)


def stokes_step(u: MacVectorField, n: ScalarField, pot: Potential,
                cfg: ProjectionConfig, q0: ScalarField | None = None
                ) -> tuple[MacVectorField, ScalarField]:
    """One viscous-then-project step.  Pure: inputs are untouched.

    Returns (u_new, P).  q0, if given, warm-starts the pressure solve
    (pass dt * previous P); it changes iteration counts, not the contract.
    """
    g = u.grid
    dt = cfg.dt
    if u.boundary_normal_max() != 0.0:
        raise ValueError("velocity entering stokes_step must have exactly "
                         "zero boundary-normal faces")
    ux = solve_viscous_x(dt, u.x, g, x0=u.x, tol=cfg.poisson_tol,
                         maxiter=cfg.max_iter)
    uy = solve_viscous_y(dt, u.y, g, x0=u.y, tol=cfg.poisson_tol,
                         maxiter=cfg.max_iter)
    f = buoyancy(n, pot)
    ustar = MacVectorField(grid=g, x=ux + dt * f.x, y=uy + dt * f.y)
    u_new, q = helmholtz_project(ustar, cfg, q0=q0)
    if u_new.boundary_normal_max() != 0.0:
        raise SolverError("projection disturbed a boundary-normal face")
    p = ScalarField(grid=g, values=q.values / dt)
    return u_new, p
