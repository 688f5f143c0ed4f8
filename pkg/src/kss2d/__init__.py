"""Finite-volume simulator for chemotaxis in an incompressible fluid.

Cell density and chemical signal evolve on cell centers of a staggered
grid, velocity on faces; sublinear signal production with configurable
exponent.  Diagnostics track the quantities that decide between bounded
evolution and blow-up.
"""

from .config import SimulationConfig, apply_overrides, load_config
from .density import TransportConfig, density_step
from .diagnostics import (DiagnosticsRecord, MonitorConfig, Verdict,
                          detect_blow_up, l1_envelope, record)
from .errors import CflError, ConfigError, SolverError
from .fields import MacVectorField, ScalarField, State
from .grid import Domain, Grid, build_grid
from .runner import RunResult, StepFailure, initial_fields, resolve_dt, run
from .signal import SignalProduction, signal_step
from .stokes import Potential, ProjectionConfig, stokes_step

__version__ = "0.1.0"

__all__ = [
    "SimulationConfig", "apply_overrides", "load_config",
    "TransportConfig", "density_step",
    "DiagnosticsRecord", "MonitorConfig", "Verdict", "detect_blow_up",
    "l1_envelope", "record",
    "CflError", "ConfigError", "SolverError",
    "MacVectorField", "ScalarField", "State",
    "Domain", "Grid", "build_grid",
    "RunResult", "StepFailure", "initial_fields", "resolve_dt", "run",
    "SignalProduction", "signal_step",
    "Potential", "ProjectionConfig", "stokes_step",
    "__version__",
]
