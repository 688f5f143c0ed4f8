"""Time-stepping loop and output writing.

One logical timeline: per step the density moves first, then the signal
(seeing the fresh density), then the velocity (pushed by the fresh
density); diagnostics are sampled every sample_every steps plus at t=0
and at the end.  First-order splitting throughout.

Outputs land in cfg.out_dir:
  diagnostics.csv   one row per sample, flushed as written
  meta.json         grid dims, spacings, field list, byte order, run info
  n_<step>.f64 ...  optional raw little-endian float64 snapshots,
                    row-major over the (nx, ny) cell array
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .config import SimulationConfig, phi_values
from .density import TransportConfig, density_step
from .diagnostics import (CSV_HEADER, DiagnosticsRecord, MonitorConfig,
                          Verdict, detect_blow_up, record)
from .errors import CflError, ConfigError, SolverError
from .fields import MacVectorField, ScalarField, State, integral
from .grid import Domain, Grid, build_grid, gradient
from .signal import SignalProduction, signal_step as _signal_step
from .stokes import Potential, ProjectionConfig, helmholtz_project, stokes_step

_AUTO_DT_FRACTION = 0.2


class StepFailure(RuntimeError):
    """A simulation step refused to run or a solve failed.

    The loop never advances past the failed step; whatever was sampled
    before the failure has already been flushed to disk.
    """

    def __init__(self, step: int, t: float, cause: Exception,
                 history: list[DiagnosticsRecord]):
        super().__init__(f"step {step} (t={t:.6g}) failed: {cause}")
        self.step = step
        self.t = t
        self.cause = cause
        self.history = history


@dataclass
class RunResult:
    state: State
    history: list[DiagnosticsRecord]
    verdict: Verdict
    out_dir: str
    dt: float
    steps: int = 0


def _read_raw(path: str, shape: tuple[int, int], what: str) -> np.ndarray:
    try:
        raw = np.fromfile(path, dtype="<f8")
    except OSError as e:
        raise ConfigError(f"{what}: cannot read {path}: {e}") from e
    want = shape[0] * shape[1]
    if raw.size != want:
        raise ConfigError(f"{what}: {path} holds {raw.size} values, "
                          f"expected {want} for shape {shape}")
    return np.ascontiguousarray(raw.reshape(shape))


def _gaussian(grid: Grid, center, width, mass: float) -> ScalarField:
    # unnormalized bump, floored at 1e-6 of its peak so the field is
    # positive everywhere, then scaled to the requested total mass
    cx, cy = center
    xc, yc = grid.center_mesh()
    vals = np.exp(-((xc - cx) ** 2 + (yc - cy) ** 2) / (2.0 * width ** 2))
    vals += 1e-6 * vals.max()
    f = ScalarField(grid=grid, values=vals)
    f.values *= mass / integral(f)
    return f


def _scalar_initial(cfg: SimulationConfig, grid: Grid, which: str) -> ScalarField:
    kind = getattr(cfg, which)
    if kind == "constant":
        return ScalarField.full(grid, getattr(cfg, which + "_value"))
    if kind == "file":
        vals = _read_raw(getattr(cfg, which + "_file"), grid.shape,
                         f"initial.{which}_file")
        return ScalarField(grid=grid, values=vals)
    center = getattr(cfg, which + "_center")
    if center is None:
        center = (0.5 * cfg.lx, 0.5 * cfg.ly)
    width = getattr(cfg, which + "_width")
    if width is None:
        width = 0.1 * min(cfg.lx, cfg.ly)
    if not width > 0.0:
        raise ConfigError(f"initial.{which}_width: must be positive, got {width}")
    return _gaussian(grid, center, width, getattr(cfg, which + "_mass"))


def _velocity_initial(cfg: SimulationConfig, grid: Grid,
                      pcfg: ProjectionConfig) -> MacVectorField:
    if cfg.u0 == "zero":
        return MacVectorField.zeros(grid)
    ux = _read_raw(cfg.u0_file_x, (grid.nx + 1, grid.ny), "initial.u0_file_x")
    uy = _read_raw(cfg.u0_file_y, (grid.nx, grid.ny + 1), "initial.u0_file_y")
    u = MacVectorField(grid=grid, x=ux, y=uy)
    if u.boundary_normal_max() != 0.0:
        raise ConfigError("initial.u0_file_x/y: boundary-normal faces must "
                          "be exactly zero (no-slip walls)")
    # file data is rarely discretely divergence-free; project it once
    u, _ = helmholtz_project(u, pcfg)
    return u


def initial_fields(cfg: SimulationConfig
                   ) -> tuple[Grid, State, Potential, SignalProduction]:
    """Build grid, initial state, potential and production law."""
    grid = build_grid(Domain(lx=cfg.lx, ly=cfg.ly), cfg.nx, cfg.ny)
    pcfg = ProjectionConfig(dt=1.0, poisson_tol=cfg.poisson_tol,
                            max_iter=cfg.max_iter)
    n = _scalar_initial(cfg, grid, "n0")
    c = _scalar_initial(cfg, grid, "c0")
    u = _velocity_initial(cfg, grid, pcfg)
    if cfg.phi == "linear-y":
        pot = Potential.linear_y(grid, cfg.g)
    else:
        pot = Potential.from_callable(grid, lambda x, y: phi_values(cfg, x, y))
    law = SignalProduction(k0=cfg.k0, alpha=cfg.alpha)
    state = State(n=n, c=c, u=u, p=ScalarField.zeros(grid), t=0.0)
    state.validate()
    return grid, state, pot, law


def resolve_dt(cfg: SimulationConfig, state: State) -> float:
    """cfg.dt, or the default rule when the config said 'auto'."""
    if cfg.dt is not None:
        return cfg.dt
    g = state.n.grid
    gmax = gradient(state.c).max_abs()
    umax = state.u.max_abs()
    return _AUTO_DT_FRACTION * min(g.dx, g.dy) / (1.0 + gmax + umax)


class _OutputWriter:
    """diagnostics.csv plus optional raw snapshots and a meta sidecar."""

    def __init__(self, cfg: SimulationConfig, grid: Grid, dt: float, steps: int):
        self.dir = cfg.out_dir
        self.snapshots = cfg.write_snapshots
        os.makedirs(self.dir, exist_ok=True)
        self._csv = open(os.path.join(self.dir, "diagnostics.csv"), "w")
        self._csv.write(CSV_HEADER + "\n")
        self._csv.flush()
        self._steps: list[int] = []
        self.meta = {
            "nx": grid.nx, "ny": grid.ny,
            "dx": grid.dx, "dy": grid.dy,
            "lx": grid.domain.lx, "ly": grid.domain.ly,
            "fields": ["n", "c", "ux", "uy"],
            "shapes": {"n": [grid.nx, grid.ny], "c": [grid.nx, grid.ny],
                       "ux": [grid.nx + 1, grid.ny],
                       "uy": [grid.nx, grid.ny + 1]},
            "dtype": "float64", "byte_order": "little", "order": "row-major",
            "dt": dt, "t_end": cfg.t_end, "steps": steps,
            "sample_every": cfg.sample_every,
            "alpha": cfg.alpha, "k0": cfg.k0, "seed": cfg.seed,
            "snapshot_steps": self._steps,
        }
        self._write_meta()

    def _write_meta(self):
        with open(os.path.join(self.dir, "meta.json"), "w") as fh:
            json.dump(self.meta, fh, indent=1)
            fh.write("\n")

    def sample(self, rec: DiagnosticsRecord, state: State, step: int):
        self._csv.write(rec.csv_row() + "\n")
        self._csv.flush()
        if self.snapshots:
            for name, arr in (("n", state.n.values), ("c", state.c.values),
                              ("ux", state.u.x), ("uy", state.u.y)):
                path = os.path.join(self.dir, f"{name}_{step}.f64")
                np.ascontiguousarray(arr, dtype="<f8").tofile(path)
            self._steps.append(step)
            self._write_meta()

    def finish(self, verdict: Verdict | None, failed_at: int | None = None):
        if verdict is not None:
            self.meta["verdict"] = verdict.value
        if failed_at is not None:
            self.meta["failed_at_step"] = failed_at
        self._write_meta()
        self._csv.close()


def run(cfg: SimulationConfig, echo_every: int = 0) -> RunResult:
    """Step the coupled system from t=0 to t_end and write outputs.

    Returns the final state, the sampled history, and the growth verdict.
    Halts early once a sample is flagged blown up.  A failed step raises
    StepFailure after flushing everything sampled so far; the state never
    advances past the failure.
    """
    grid, state, pot, law = initial_fields(cfg)
    dt = resolve_dt(cfg, state)
    nsteps = max(1, int(math.ceil(cfg.t_end / dt - 1e-9)))
    dt_last = cfg.t_end - (nsteps - 1) * dt
    if abs(dt_last - dt) <= 1e-12 * dt:
        dt_last = dt

    tcfg = TransportConfig(dt=dt, diffusion_solver_tol=cfg.diffusion_tol,
                           max_iter=cfg.max_iter)
    pcfg = ProjectionConfig(dt=dt, poisson_tol=cfg.poisson_tol,
                            max_iter=cfg.max_iter)
    mcfg = MonitorConfig(p=cfg.p, q=cfg.q, lam=cfg.lam,
                         blow_up_threshold=cfg.blow_up_threshold,
                         sample_every=cfg.sample_every)

    out = _OutputWriter(cfg, grid, dt, nsteps)
    history: list[DiagnosticsRecord] = []

    def sample(step: int) -> DiagnosticsRecord:
        rec = record(state, mcfg)
        history.append(rec)
        out.sample(rec, state, step)
        if echo_every and (len(history) - 1) % echo_every == 0:
            print(f"  step {step:>8d}  t={rec.t:<10.5g} mass={rec.mass:.6g} "
                  f"linf_n={rec.linf_n:.6g} linf_u={rec.linf_u:.3g}")
        return rec

    sample(0)
    q_prev: ScalarField | None = None
    step = 0
    try:
        for step in range(1, nsteps + 1):
            dtk = dt if step < nsteps else dt_last
            if dtk != dt:
                tck = TransportConfig(dt=dtk,
                                      diffusion_solver_tol=cfg.diffusion_tol,
                                      max_iter=cfg.max_iter)
                pck = ProjectionConfig(dt=dtk, poisson_tol=cfg.poisson_tol,
                                       max_iter=cfg.max_iter)
            else:
                tck, pck = tcfg, pcfg
            n1 = density_step(state.n, state.c, state.u, tck)
            c1 = _signal_step(state.c, n1, state.u, law, tck)
            u1, p1 = stokes_step(state.u, n1, pot, pck, q0=q_prev)
            q_prev = ScalarField(grid=grid, values=p1.values * dtk)
            t_now = cfg.t_end if step == nsteps else step * dt
            state = State(n=n1, c=c1, u=u1, p=p1, t=t_now)
            due = (step % cfg.sample_every == 0) or (step == nsteps)
            if not due:
                # cheap guard so a mid-interval explosion still gets a
                # flagged record within one sample interval
                finite = (np.isfinite(state.n.values).all()
                          and np.isfinite(state.c.values).all())
                due = not bool(finite)
            if due:
                rec = sample(step)
                if rec.blown_up:
                    break
    except (CflError, SolverError) as e:
        verdict = detect_blow_up(history) if history else None
        out.finish(verdict, failed_at=step)
        raise StepFailure(step, state.t, e, history) from e

    verdict = detect_blow_up(history)
    out.finish(verdict)
    return RunResult(state=state, history=history, verdict=verdict,
                     out_dir=cfg.out_dir, dt=dt, steps=step)


def homogeneous_config(cfg: SimulationConfig) -> SimulationConfig:
    """Convenience for tests: constants chosen so nothing should move."""
    from dataclasses import replace
    return replace(cfg, n0="constant", c0="constant",
                   c0_value=cfg.k0 * cfg.n0_value ** cfg.alpha,
                   u0="zero", phi="expression", phi_expr="0*x")
