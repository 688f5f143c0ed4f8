"""Signal (chemoattractant) update with sublinear production.

Production follows f(n) = k0 n^alpha with alpha in (0, 1]; together with
conservation of the total cell mass this caps the integral of f by
k0 m^alpha |domain|^(1-alpha), which is what bounds the L1 trajectory of
the signal (see diagnostics.l1_envelope).

The step treats diffusion and the -c decay implicitly and advection plus
production explicitly, mirroring the density step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .density import TransportConfig, cfl_bound, _CFL_SLACK
from .errors import CflError
from .fields import MacVectorField, ScalarField, _checked_nonnegative
from .solvers import solve_helmholtz_cell


@dataclass(frozen=True)
class SignalProduction:
    k0: float
    alpha: float

    def __post_init__(self):
        if not (np.isfinite(self.k0) and self.k0 > 0.0):
            raise ValueError(f"production rate k0 must be positive, got {self.k0}")
        if not (np.isfinite(self.alpha) and 0.0 < self.alpha <= 1.0):
            raise ValueError(
                f"production exponent alpha must lie in (0, 1], got {self.alpha}")


def production(n: ScalarField, law: SignalProduction) -> ScalarField:
    """Pointwise production k0 n^alpha, with 0^alpha = 0.

    Negatives at roundoff scale are flushed to zero; genuinely negative
    densities are rejected.
    """
    v = _checked_nonnegative(n.values, "production")
    if law.alpha == 1.0:
        out = law.k0 * v
    elif law.alpha == 0.5:
        out = law.k0 * np.sqrt(v)
    else:
        out = law.k0 * np.power(v, law.alpha)
    return ScalarField(grid=n.grid, values=out)


def signal_step(c: ScalarField, n: ScalarField, u: MacVectorField,
                law: SignalProduction, cfg: TransportConfig) -> ScalarField:
    """One IMEX step of the signal equation.  Pure: inputs are untouched."""
    g = c.grid
    dt = cfg.dt
    prod = production(n, law)
    cstar, umax = K.signal_cstar(c.values, u.x, u.y, prod.values,
                                 g.dx, g.dy, dt)
    nu = cfl_bound(dt, 0.0, umax, g.dx, g.dy)
    if nu > _CFL_SLACK:
        raise CflError(
            f"advective CFL number {nu:.3f} > 1 (dt={dt:.3e}, "
            f"max|u|={umax:.3e}); refusing the signal step")
    solved = solve_helmholtz_cell(1.0 + dt, dt, cstar, g,
                                  x0=cstar / (1.0 + dt),
                                  tol=cfg.diffusion_solver_tol,
                                  maxiter=cfg.max_iter)
    return ScalarField(grid=g, values=solved)
