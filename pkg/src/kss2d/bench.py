"""Backend comparison: numba kernels against the numpy fallback.

Times the hot paths on a representative workload: the upwind transport
kernel, one implicit diffusion solve, one pressure Poisson solve, and a
full coupled time step.  Each measurement is the best of `reps` calls
after a warmup (the warmup also absorbs jit compilation).
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .density import TransportConfig, density_step
from .fields import MacVectorField, ScalarField, integral, mac_from_streamfunction
from .grid import Domain, build_grid, gradient
from .signal import SignalProduction, signal_step
from .solvers import solve_poisson_neumann
from .stokes import Potential, ProjectionConfig, stokes_step


@dataclass
class BenchRow:
    name: str
    numpy_ms: float
    numba_ms: float | None

    @property
    def speedup(self) -> float | None:
        if self.numba_ms is None or self.numba_ms == 0.0:
            return None
        return self.numpy_ms / self.numba_ms


def _workloads(size: int):
    g = build_grid(Domain(lx=1.0, ly=1.0), size, size)
    xc, yc = g.center_mesh()
    n = ScalarField(grid=g, values=np.exp(
        -((xc - 0.5) ** 2 + (yc - 0.5) ** 2) / 0.02) + 1e-3)
    n.values *= 1.0 / integral(n)
    c = ScalarField(grid=g, values=0.1 * np.cos(np.pi * xc) * np.cos(np.pi * yc)
                    + 0.2)
    xn, yn = np.meshgrid(g.x_faces(), g.y_faces(), indexing="ij")
    psi = (0.05 / np.pi) * np.sin(np.pi * xn) * np.sin(np.pi * yn)
    psi[0, :] = psi[-1, :] = 0.0    # sin(pi) roundoff would leak
    psi[:, 0] = psi[:, -1] = 0.0    # through the no-slip walls
    u = mac_from_streamfunction(g, psi)
    dt = 0.2 * min(g.dx, g.dy) / (1.0 + gradient(c).max_abs() + u.max_abs())

    tcfg = TransportConfig(dt=dt)
    pcfg = ProjectionConfig(dt=dt)
    law = SignalProduction(k0=1.0, alpha=0.5)
    pot = Potential.linear_y(g, 1.0)
    div = np.sin(2.0 * np.pi * xc) * np.cos(np.pi * yc) * g.cell_volume

    def w_transport():
        K.transport_nstar(n.values, c.values, u.x, u.y, g.dx, g.dy, dt)

    def w_diffusion():
        K.cg_cell(1.0 + dt, dt, g.dx, g.dy, n.values, n.values / (1.0 + dt),
                  1e-12, 5000)

    def w_poisson():
        solve_poisson_neumann(div, g, None, tol=1e-10, max_cycles=200)

    def w_step():
        n1 = density_step(n, c, u, tcfg)
        c1 = signal_step(c, n1, u, law, tcfg)
        stokes_step(u, n1, pot, pcfg)

    return [("transport kernel", w_transport),
            ("diffusion solve", w_diffusion),
            ("poisson solve", w_poisson),
            ("coupled step", w_step)]


def _best_ms(fn, reps: int) -> float:
    fn()  # warmup; first numba call compiles
    best = float("inf")
    for _ in range(max(1, reps)):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return 1e3 * best


def run_benchmark(size: int = 128, reps: int = 5) -> list[BenchRow]:
    prev = K.active_backend()
    rows = []
    try:
        names = [name for name, _ in _workloads(size)]
        timings = {}
        for backend in ("numpy", "numba") if K.HAS_NUMBA else ("numpy",):
            K.set_backend(backend)
            for name, fn in _workloads(size):
                timings[(backend, name)] = _best_ms(fn, reps)
        for name in names:
            rows.append(BenchRow(
                name=name,
                numpy_ms=timings[("numpy", name)],
                numba_ms=timings.get(("numba", name))))
    finally:
        K.set_backend(prev)
    return rows


def format_table(rows: list[BenchRow]) -> str:
    lines = [f"{'workload':<18s} {'numpy ms':>10s} {'numba ms':>10s} "
             f"{'speedup':>8s}"]
    for r in rows:
        nb = f"{r.numba_ms:10.3f}" if r.numba_ms is not None else "         -"
        sp = f"{r.speedup:7.1f}x" if r.speedup is not None else "       -"
        lines.append(f"{r.name:<18s} {r.numpy_ms:10.3f} {nb} {sp}")
    return "\n".join(lines)
