"""Simulation configuration: INI-style text files plus CLI overrides.

A config file uses key/value pairs grouped in sections:

    [domain]   lx, ly
    [grid]     nx, ny
    [physics]  k0, alpha, phi (linear-y | expression), g, phi_expr, lambda
    [initial]  n0 (gaussian | constant | file) with n0_* parameters,
               c0, u0 likewise
    [time]     dt (number or 'auto'), t_end, sample_every
    [solver]   diffusion_tol, poisson_tol, max_iter
    [monitor]  p, q, blow_up_threshold
    [output]   dir, write_snapshots
    [run]      seed

dt must be present; 'auto' picks 0.2 min(dx,dy) / (1 + max|grad c0| +
max|u0|) once the initial fields exist.  Every numeric bound is validated
here with the offending section.key named in the error.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ConfigError

_DEFAULTS = {
    ("domain", "lx"): "1.0",
    ("domain", "ly"): "1.0",
    ("grid", "nx"): "64",
    ("grid", "ny"): "64",
    ("physics", "k0"): "1.0",
    ("physics", "alpha"): "0.5",
    ("physics", "phi"): "linear-y",
    ("physics", "g"): "1.0",
    ("physics", "phi_expr"): "",
    ("physics", "lambda"): "1.0",
    ("initial", "n0"): "gaussian",
    ("initial", "n0_center"): "",
    ("initial", "n0_width"): "",
    ("initial", "n0_mass"): "1.0",
    ("initial", "n0_value"): "1.0",
    ("initial", "n0_file"): "",
    ("initial", "c0"): "constant",
    ("initial", "c0_value"): "0.0",
    ("initial", "c0_center"): "",
    ("initial", "c0_width"): "",
    ("initial", "c0_mass"): "1.0",
    ("initial", "c0_file"): "",
    ("initial", "u0"): "zero",
    ("initial", "u0_file_x"): "",
    ("initial", "u0_file_y"): "",
    ("time", "t_end"): "1.0",
    ("time", "sample_every"): "10",
    ("solver", "diffusion_tol"): "1e-12",
    ("solver", "poisson_tol"): "1e-12",
    ("solver", "max_iter"): "2000",
    ("monitor", "p"): "2.0",
    ("monitor", "q"): "2.0",
    ("monitor", "blow_up_threshold"): "1e8",
    ("output", "dir"): "out",
    ("output", "write_snapshots"): "true",
    ("run", "seed"): "0",
}


@dataclass(frozen=True)
class SimulationConfig:
    lx: float
    ly: float
    nx: int
    ny: int
    k0: float
    alpha: float
    phi: str                 # "linear-y" or "expression"
    g: float
    phi_expr: str
    lam: float
    n0: str                  # "gaussian" | "constant" | "file"
    n0_center: Optional[tuple[float, float]]
    n0_width: Optional[float]
    n0_mass: float
    n0_value: float
    n0_file: str
    c0: str
    c0_value: float
    c0_center: Optional[tuple[float, float]]
    c0_width: Optional[float]
    c0_mass: float
    c0_file: str
    u0: str                  # "zero" | "file"
    u0_file_x: str
    u0_file_y: str
    dt: Optional[float]      # None means 'auto'
    t_end: float
    sample_every: int
    diffusion_tol: float
    poisson_tol: float
    max_iter: int
    p: float
    q: float
    blow_up_threshold: float
    out_dir: str
    write_snapshots: bool
    seed: int

    def validate(self):
        def bad(key, msg):
            raise ConfigError(f"{key}: {msg}")

        if not self.lx > 0.0:
            bad("domain.lx", f"must be positive, got {self.lx}")
        if not self.ly > 0.0:
            bad("domain.ly", f"must be positive, got {self.ly}")
        if self.nx < 4 or self.ny < 4:
            bad("grid.nx/ny", f"cell counts must be >= 4, got {self.nx}, {self.ny}")
        if not self.k0 > 0.0:
            bad("physics.k0", f"must be positive, got {self.k0}")
        if not 0.0 < self.alpha <= 1.0:
            bad("physics.alpha",
                f"production exponent must lie in (0, 1], got {self.alpha}")
        if self.phi not in ("linear-y", "expression"):
            bad("physics.phi", f"must be 'linear-y' or 'expression', got {self.phi!r}")
        if self.phi == "expression" and not self.phi_expr.strip():
            bad("physics.phi_expr", "required when phi = expression")
        if self.lam < 0.0:
            bad("physics.lambda", f"must be >= 0, got {self.lam}")
        for name, kind, mass, path in (("n0", self.n0, self.n0_mass, self.n0_file),
                                       ("c0", self.c0, self.c0_mass, self.c0_file)):
            if kind not in ("gaussian", "constant", "file"):
                bad(f"initial.{name}",
                    f"must be gaussian, constant or file, got {kind!r}")
            if kind == "gaussian" and not mass > 0.0:
                bad(f"initial.{name}_mass", f"must be positive, got {mass}")
            if kind == "file" and not path:
                bad(f"initial.{name}_file", "required for file initial data")
        if self.c0 == "constant" and self.c0_value < 0.0:
            bad("initial.c0_value", f"must be >= 0, got {self.c0_value}")
        if self.n0 == "constant" and self.n0_value < 0.0:
            bad("initial.n0_value", f"must be >= 0, got {self.n0_value}")
        if self.u0 not in ("zero", "file"):
            bad("initial.u0", f"must be zero or file, got {self.u0!r}")
        if self.u0 == "file" and not (self.u0_file_x and self.u0_file_y):
            bad("initial.u0_file_x/y", "required for file initial velocity")
        if self.dt is not None and not self.dt > 0.0:
            bad("time.dt", f"must be positive or 'auto', got {self.dt}")
        if not self.t_end > 0.0:
            bad("time.t_end", f"must be positive, got {self.t_end}")
        if self.sample_every < 1:
            bad("time.sample_every", f"must be >= 1, got {self.sample_every}")
        if not 0.0 < self.diffusion_tol <= 1e-8:
            bad("solver.diffusion_tol",
                f"must lie in (0, 1e-8], got {self.diffusion_tol}")
        if not 0.0 < self.poisson_tol <= 1e-8:
            bad("solver.poisson_tol",
                f"must lie in (0, 1e-8], got {self.poisson_tol}")
        if self.max_iter < 1:
            bad("solver.max_iter", f"must be >= 1, got {self.max_iter}")
        if self.p < 1.0:
            bad("monitor.p", f"must be >= 1, got {self.p}")
        if self.q < 1.0:
            bad("monitor.q", f"must be >= 1, got {self.q}")
        if not self.blow_up_threshold > 0.0:
            bad("monitor.blow_up_threshold",
                f"must be positive, got {self.blow_up_threshold}")


def _pair(raw: str, key: str) -> Optional[tuple[float, float]]:
    raw = raw.strip()
    if not raw:
        return None
    parts = raw.replace(",", " ").split()
    if len(parts) != 2:
        raise ConfigError(f"{key}: expected two numbers, got {raw!r}")
    return (float(parts[0]), float(parts[1]))


def load_config(path: str) -> SimulationConfig:
    """Parse and validate a configuration file."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            cp.read_file(fh, source=path)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except configparser.Error as e:
        # configparser reports the offending line in its message
        raise ConfigError(f"parse error in {path}: {e}") from e

    def get(section, key):
        if cp.has_option(section, key):
            return cp.get(section, key).strip()
        return _DEFAULTS[(section, key)]

    def get_float(section, key):
        raw = get(section, key)
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{section}.{key}: not a number: {raw!r}") from None

    def get_int(section, key):
        raw = get(section, key)
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{section}.{key}: not an integer: {raw!r}") from None

    def get_bool(section, key):
        raw = get(section, key).lower()
        if raw in ("1", "true", "yes", "on"):
            return True
        if raw in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{section}.{key}: not a boolean: {raw!r}")

    if not cp.has_option("time", "dt"):
        raise ConfigError("time.dt: required (a number, or 'auto' for the "
                          "0.2 min(dx,dy)/(1 + max|grad c0| + max|u0|) rule)")
    raw_dt = cp.get("time", "dt").strip().lower()
    if raw_dt == "auto":
        dt = None
    else:
        try:
            dt = float(raw_dt)
        except ValueError:
            raise ConfigError(f"time.dt: not a number or 'auto': {raw_dt!r}") from None

    cfg = SimulationConfig(
        lx=get_float("domain", "lx"),
        ly=get_float("domain", "ly"),
        nx=get_int("grid", "nx"),
        ny=get_int("grid", "ny"),
        k0=get_float("physics", "k0"),
        alpha=get_float("physics", "alpha"),
        phi=get("physics", "phi"),
        g=get_float("physics", "g"),
        phi_expr=get("physics", "phi_expr"),
        lam=get_float("physics", "lambda"),
        n0=get("initial", "n0"),
        n0_center=_pair(get("initial", "n0_center"), "initial.n0_center"),
        n0_width=(float(get("initial", "n0_width"))
                  if get("initial", "n0_width") else None),
        n0_mass=get_float("initial", "n0_mass"),
        n0_value=get_float("initial", "n0_value"),
        n0_file=get("initial", "n0_file"),
        c0=get("initial", "c0"),
        c0_value=get_float("initial", "c0_value"),
        c0_center=_pair(get("initial", "c0_center"), "initial.c0_center"),
        c0_width=(float(get("initial", "c0_width"))
                  if get("initial", "c0_width") else None),
        c0_mass=get_float("initial", "c0_mass"),
        c0_file=get("initial", "c0_file"),
        u0=get("initial", "u0"),
        u0_file_x=get("initial", "u0_file_x"),
        u0_file_y=get("initial", "u0_file_y"),
        dt=dt,
        t_end=get_float("time", "t_end"),
        sample_every=get_int("time", "sample_every"),
        diffusion_tol=get_float("solver", "diffusion_tol"),
        poisson_tol=get_float("solver", "poisson_tol"),
        max_iter=get_int("solver", "max_iter"),
        p=get_float("monitor", "p"),
        q=get_float("monitor", "q"),
        blow_up_threshold=get_float("monitor", "blow_up_threshold"),
        out_dir=get("output", "dir"),
        write_snapshots=get_bool("output", "write_snapshots"),
        seed=get_int("run", "seed"),
    )
    cfg.validate()
    return cfg


def apply_overrides(cfg: SimulationConfig, *, alpha=None, nx=None, ny=None,
                    dt=None, t_end=None, out=None, seed=None) -> SimulationConfig:
    """Apply CLI overrides and re-validate.  dt accepts a number or 'auto'."""
    kw = {}
    if alpha is not None:
        kw["alpha"] = float(alpha)
    if nx is not None:
        kw["nx"] = int(nx)
    if ny is not None:
        kw["ny"] = int(ny)
    if dt is not None:
        if isinstance(dt, str) and dt.strip().lower() == "auto":
            kw["dt"] = None
        else:
            kw["dt"] = float(dt)
    if t_end is not None:
        kw["t_end"] = float(t_end)
    if out is not None:
        kw["out_dir"] = str(out)
    if seed is not None:
        kw["seed"] = int(seed)
    new = replace(cfg, **kw)
    new.validate()
    return new


def phi_values(cfg: SimulationConfig, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Evaluate the potential on coordinate arrays."""
    if cfg.phi == "linear-y":
        return cfg.g * y * np.ones_like(x)
    ns = {"x": x, "y": y, "np": np, "pi": np.pi,
          "sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt,
          "abs": np.abs, "tanh": np.tanh, "log": np.log}
    try:
        out = eval(cfg.phi_expr, {"__builtins__": {}}, ns)  # noqa: S307
    except Exception as e:
        raise ConfigError(f"physics.phi_expr: cannot evaluate "
                          f"{cfg.phi_expr!r}: {e}") from e
    return np.asarray(out, dtype=np.float64) * np.ones_like(x)
