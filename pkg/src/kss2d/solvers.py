"""Iterative solves behind the implicit steps.

Two solver families, both satisfying the same contract (relative residual
<= tol, else SolverError):

* conjugate gradients for the well-conditioned Helmholtz-type operators
  (a I - b lap) arising from implicit diffusion and the viscous step;
* geometric multigrid V-cycles for the pure-Neumann pressure Poisson
  problem, whose condition number grows with resolution and would make CG
  the dominant cost of a run.

Grids whose dimensions cannot be halved fall back to CG for the Poisson
solve as well; that path is slow on fine grids but correct.
"""
from __future__ import annotations

import numpy as np

from . import kernels as K
from .errors import SolverError
from .grid import Grid


def solve_helmholtz_cell(a: float, b: float, rhs: np.ndarray, grid: Grid,
                         x0: np.ndarray, tol: float, maxiter: int) -> np.ndarray:
    """Solve (a I - b lap) x = rhs on cell centers with zero-flux walls."""
    x, iters, relres = K.cg_cell(float(a), float(b), grid.dx, grid.dy,
                                 rhs, x0, float(tol), int(maxiter))
    if relres > tol:
        raise SolverError(
            f"cell Helmholtz CG stalled at relres {relres:.3e} > {tol:.1e} "
            f"after {iters} iterations")
    return x

def solve_viscous_x(dt: float, rhs: np.ndarray, grid: Grid, x0: np.ndarray,
                    tol: float, maxiter: int) -> np.ndarray:
    """Solve (I - dt lap) vx = rhs on x-faces with no-slip walls."""
    x, iters, relres = K.cg_facex(float(dt), grid.dx, grid.dy, rhs, x0,
                                  float(tol), int(maxiter))
    if relres > tol:
        raise SolverError(
            f"x-face viscous CG stalled at relres {relres:.3e} > {tol:.1e} "
            f"after {iters} iterations")
    return x


def solve_viscous_y(dt: float, rhs: np.ndarray, grid: Grid, x0: np.ndarray,
                    tol: float, maxiter: int) -> np.ndarray:
    x, iters, relres = K.cg_facey(float(dt), grid.dx, grid.dy, rhs, x0,
                                  float(tol), int(maxiter))
    if relres > tol:
        raise SolverError(
            f"y-face viscous CG stalled at relres {relres:.3e} > {tol:.1e} "
            f"after {iters} iterations")
    return x


# ---------------------------------------------------------------------------
# Neumann Poisson via geometric multigrid
# ---------------------------------------------------------------------------

_NU_PRE = 2
_NU_POST = 2
_COARSE_SWEEPS = 60
_MIN_COARSE = 4


def _levels(grid: Grid) -> list[tuple[int, int, float, float]]:
    levels = [(grid.nx, grid.ny, grid.dx, grid.dy)]
    nx, ny, dx, dy = levels[0]
    while (nx % 2 == 0 and ny % 2 == 0
           and nx // 2 >= _MIN_COARSE and ny // 2 >= _MIN_COARSE):
        nx, ny, dx, dy = nx // 2, ny // 2, 2.0 * dx, 2.0 * dy
        levels.append((nx, ny, dx, dy))
    return levels


def _vcycle(levels, xs, bs, lev):
    nx, ny, dx, dy = levels[lev]
    x, b = xs[lev], bs[lev]
    if lev == len(levels) - 1:
        for _ in range(_COARSE_SWEEPS):
            K.rbgs_sweep(x, b, dx, dy)
        return
    for _ in range(_NU_PRE):
        K.rbgs_sweep(x, b, dx, dy)
    r = K.residual_cell(x, b, dx, dy)
    bs[lev + 1] = K.restrict_fw(r)
    xs[lev + 1] = np.zeros_like(bs[lev + 1])
    _vcycle(levels, xs, bs, lev + 1)
    K.prolong_add(xs[lev + 1], x)
    for _ in range(_NU_POST):
        K.rbgs_sweep(x, b, dx, dy)


def solve_poisson_neumann(b: np.ndarray, grid: Grid, x0: np.ndarray | None,
                          tol: float, max_cycles: int = 60
                          ) -> tuple[np.ndarray, float, int]:
    """Solve lap q = b with zero-flux walls; q is returned mean-free.

    The mean of b is projected out first (the discrete compatibility
    condition; for divergences of no-slip fields it is already zero to
    roundoff).  Returns (q, relres, work) where work counts V-cycles, or CG
    iterations on the fallback path.
    """
    b0 = b - b.mean()
    bnorm = float(np.sqrt((b0 * b0).sum()))
    if bnorm == 0.0:
        return np.zeros_like(b), 0.0, 0
    levels = _levels(grid)
    if len(levels) == 1:
        # dimensions not halvable: plain CG on -lap q = -b0
        x, iters, relres = K.cg_cell(0.0, 1.0, grid.dx, grid.dy, -b0,
                                     x0 if x0 is not None else np.zeros_like(b0),
                                     float(tol), 20 * (grid.nx + grid.ny) + 200)
        if relres > tol:
            raise SolverError(
                f"Poisson CG fallback stalled at relres {relres:.3e}")
        return x - x.mean(), relres, iters

    x = x0.copy() if x0 is not None else np.zeros_like(b0)
    xs: list[np.ndarray] = [x] + [None] * (len(levels) - 1)  # type: ignore
    bs: list[np.ndarray] = [b0] + [None] * (len(levels) - 1)  # type: ignore
    relres = np.inf
    for cycle in range(1, int(max_cycles) + 1):
        _vcycle(levels, xs, bs, 0)
        r = K.residual_cell(x, b0, grid.dx, grid.dy)
        relres = float(np.sqrt((r * r).sum())) / bnorm
        if relres <= tol:
            return x - x.mean(), relres, cycle
    raise SolverError(
        f"Poisson multigrid stalled at relres {relres:.3e} > {tol:.1e} "
        f"after {max_cycles} V-cycles")
