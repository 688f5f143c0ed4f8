"""Monitoring of the quantities that control boundedness.

The monitored set follows the a-priori estimate chain for this system:
total mass (conserved), the L1 trajectory of the signal against its
exponential envelope, the entropy-plus-gradient energy, selected Lebesgue
norms of the density and signal gradient, and the fluid seminorms.  The
module also carries self-checks for the elementary inequalities the chain
leans on (weighted Young, the pointwise Laplacian/Hessian bound, a
Gagliardo-Nirenberg-type ratio) so a failing bound in a run can be told
apart from a broken estimate.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fields import (MacVectorField, ScalarField, State, _checked_nonnegative,
                     entropy, grad_lp_norm, integral, lp_norm)
from .grid import BoundaryKind, gradient, divergence, hessian_frobenius, laplacian

CSV_HEADER = ("t,mass,l1_c,linf_n,lp_n,l2q_gradc,entropy,energy_y,"
              "l2_gradc,du_l32,linf_u,div_u_max,blown_up")


class Verdict(Enum):
    BOUNDED = "bounded"
    GROWING = "growing"
    BLOWN_UP = "blown_up"


@dataclass(frozen=True)
class MonitorConfig:
    p: float = 2.0
    q: float = 2.0
    lam: float = 1.0          # weight of the gradient term in energy_y
    blow_up_threshold: float = 1e8
    sample_every: int = 10

    def __post_init__(self):
        if not self.p >= 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not self.q >= 1.0:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if not self.lam >= 0.0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if not self.blow_up_threshold > 0.0:
            raise ValueError(
                f"blow_up_threshold must be positive, got {self.blow_up_threshold}")
        if self.sample_every < 1:
            raise ValueError(f"sample_every must be >= 1, got {self.sample_every}")


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    mass: float
    l1_c: float
    linf_n: float
    lp_n: float
    l2q_gradc: float
    entropy: float
    energy_y: float
    l2_gradc: float
    du_l32: float
    linf_u: float
    div_u_max: float
    blown_up: bool

    def csv_row(self) -> str:
        vals = (self.t, self.mass, self.l1_c, self.linf_n, self.lp_n,
                self.l2q_gradc, self.entropy, self.energy_y, self.l2_gradc,
                self.du_l32, self.linf_u, self.div_u_max)
        return ",".join(f"{v:.15g}" for v in vals) + f",{int(self.blown_up)}"


def du_lp_norm(u: MacVectorField, p: float) -> float:
    """L^p norm of the full velocity gradient tensor at cell centers.

    Normal derivatives are native to the staggering; tangential ones use
    face averages with antisymmetric wall ghosts (no-slip).
    """
    g = u.grid
    dux_dx = (u.x[1:, :] - u.x[:-1, :]) / g.dx
    duy_dy = (u.y[:, 1:] - u.y[:, :-1]) / g.dy

    uxc = 0.5 * (u.x[:-1, :] + u.x[1:, :])
    px = np.pad(uxc, ((0, 0), (1, 1)), mode="edge")
    px[:, 0] *= -1.0
    px[:, -1] *= -1.0
    dux_dy = (px[:, 2:] - px[:, :-2]) / (2.0 * g.dy)

    uyc = 0.5 * (u.y[:, :-1] + u.y[:, 1:])
    py = np.pad(uyc, ((1, 1), (0, 0)), mode="edge")
    py[0, :] *= -1.0
    py[-1, :] *= -1.0
    duy_dx = (py[2:, :] - py[:-2, :]) / (2.0 * g.dx)

    mag = np.sqrt(dux_dx**2 + dux_dy**2 + duy_dx**2 + duy_dy**2)
    return lp_norm(ScalarField(grid=g, values=mag), p)


def record(state: State, cfg: MonitorConfig) -> DiagnosticsRecord:
    """Snapshot the monitored quantities.  Deterministic in the state.

    If any field carries non-finite values the record is flagged blown_up
    and the unreachable entries are NaN.
    """
    finite = (np.isfinite(state.n.values).all()
              and np.isfinite(state.c.values).all()
              and np.isfinite(state.u.x).all()
              and np.isfinite(state.u.y).all())
    if not finite:
        nan = float("nan")
        return DiagnosticsRecord(t=state.t, mass=nan, l1_c=nan, linf_n=nan,
                                 lp_n=nan, l2q_gradc=nan, entropy=nan,
                                 energy_y=nan, l2_gradc=nan, du_l32=nan,
                                 linf_u=nan, div_u_max=nan, blown_up=True)
    linf_n = lp_norm(state.n, np.inf)
    l2_gradc = grad_lp_norm(state.c, 2.0) ** 2
    ent = entropy(state.n)
    return DiagnosticsRecord(
        t=state.t,
        mass=integral(state.n),
        l1_c=integral(state.c),
        linf_n=linf_n,
        lp_n=lp_norm(state.n, cfg.p),
        l2q_gradc=grad_lp_norm(state.c, 2.0 * cfg.q),
        entropy=ent,
        energy_y=ent + cfg.lam * l2_gradc,
        l2_gradc=l2_gradc,
        du_l32=du_lp_norm(state.u, 1.5),
        linf_u=state.u.max_abs(),
        div_u_max=lp_norm(divergence(state.u), np.inf),
        blown_up=bool(linf_n > cfg.blow_up_threshold),
    )


def detect_blow_up(history: list[DiagnosticsRecord]) -> Verdict:
    """Classify a run from its record history.

    blown_up if any record was flagged; growing if the sup norm of the
    density grew by 10x or more across the second half of the run; bounded
    otherwise.
    """
    if not history:
        return Verdict.BOUNDED
    if any(r.blown_up for r in history):
        return Verdict.BLOWN_UP
    if len(history) >= 4:
        start = history[len(history) // 2].linf_n
        end = history[-1].linf_n
        if end >= 10.0 * max(start, 1e-300):
            return Verdict.GROWING
    return Verdict.BOUNDED


# ---------------------------------------------------------------------------
# the explicit constants and inequality self-checks
# ---------------------------------------------------------------------------

def l1_envelope(t: float, y0: float, k0: float, alpha: float, mass: float,
                area: float) -> float:
    """Upper envelope for the L1 trajectory of the signal.

    y(t) <= y0 e^-t + C2 (1 - e^-t) with C2 = k0 mass^alpha area^(1-alpha):
    the production integral is held below C2 by mass conservation and the
    interpolation inequality for integrals of concave powers.
    """
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if mass < 0.0 or area <= 0.0 or k0 <= 0.0 or not 0.0 < alpha <= 1.0:
        raise ValueError("invalid envelope parameters")
    c2 = k0 * mass**alpha * area**(1.0 - alpha)
    decay = np.exp(-t)
    return float(y0 * decay + c2 * (1.0 - decay))


def young_constant(eps: float, p: float, q: float) -> float:
    """Sharp constant C with a b <= eps a^p + C b^q for conjugate p, q.

    C(eps, p, q) = (eps p)^(-q/p) / q; equality at a = (b/(eps p))^(1/(p-1)).
    """
    if not (np.isfinite(eps) and eps > 0.0):
        raise ValueError(f"eps must be positive, got {eps}")
    if not (p > 1.0 and q > 1.0):
        raise ValueError(f"exponents must exceed 1, got p={p}, q={q}")
    if abs(1.0 / p + 1.0 / q - 1.0) > 1e-12:
        raise ValueError(f"p={p} and q={q} are not conjugate")
    return float((eps * p) ** (-q / p) / q)


@dataclass(frozen=True)
class YoungReport:
    samples: int
    violations: int
    max_ratio: float
    equality_ratio: float


def check_young(samples: int, rng_seed: int) -> YoungReport:
    """Stress the weighted Young inequality on random inputs.

    Draws a, b in [0, 1e3], eps log-uniform in [1e-2, 1e2], p in (1, 8];
    counts violations of a b <= eps a^p + C b^q beyond roundoff and reports
    the largest ratio of the two sides.  The constructed equality case
    (a chosen as the maximizer) must come out at ratio 1.
    """
    rng = np.random.default_rng(rng_seed)
    a = rng.uniform(0.0, 1e3, samples)
    b = rng.uniform(0.0, 1e3, samples)
    eps = 10.0 ** rng.uniform(-2.0, 2.0, samples)
    p = rng.uniform(1.1, 8.0, samples)
    q = p / (p - 1.0)
    c = (eps * p) ** (-q / p) / q
    lhs = a * b
    rhs = eps * a**p + c * b**q
    violations = int(np.count_nonzero(lhs > rhs * (1.0 + 1e-12)))
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(rhs > 0.0, lhs / rhs, 0.0)
    max_ratio = float(ratio.max()) if samples else 0.0

    b0, eps0, p0 = 2.0, 0.7, 3.0
    q0 = p0 / (p0 - 1.0)
    a0 = (b0 / (eps0 * p0)) ** (1.0 / (p0 - 1.0))
    eq_ratio = float(a0 * b0 / (eps0 * a0**p0
                                + young_constant(eps0, p0, q0) * b0**q0))
    return YoungReport(samples=samples, violations=violations,
                       max_ratio=max(max_ratio, eq_ratio),
                       equality_ratio=eq_ratio)


@dataclass(frozen=True)
class HessianReport:
    violations: int
    max_excess: float
    scale: float


def check_hessian_cs(c: ScalarField) -> HessianReport:
    """Verify |lap c| <= sqrt(2) |D2 c| cellwise in the interior.

    The five-point Laplacian is the trace of the centered Hessian there, so
    the inequality is exact up to roundoff; the allowance is 1e-10 of the
    Hessian scale.
    """
    lap = laplacian(c, BoundaryKind.NEUMANN_ZERO).values[1:-1, 1:-1]
    hess = hessian_frobenius(c).values[1:-1, 1:-1]
    scale = max(1.0, float(hess.max()) if hess.size else 1.0)
    excess = np.abs(lap) - (np.sqrt(2.0) * hess + 1e-10 * scale)
    return HessianReport(violations=int(np.count_nonzero(excess > 0.0)),
                         max_excess=float(excess.max()) if excess.size else 0.0,
                         scale=scale)


def check_gn_ratio(n: ScalarField, r: float, s: float) -> float:
    """Interpolation ratio int(n^{rs}) / ((int |grad n^{r/2}|^2)^{(rs-1)/r} + 1).

    Boundedness of this ratio under refinement is what the L^p estimate
    chain borrows from the Gagliardo-Nirenberg inequality; r, s >= 1 keeps
    the exponents in the inequality's admissible range.
    """
    if r < 1.0 or s < 1.0:
        raise ValueError(f"exponents must satisfy r, s >= 1, got r={r}, s={s}")
    v = _checked_nonnegative(n.values, "check_gn_ratio")
    g = n.grid
    w = ScalarField(grid=g, values=np.power(v, 0.5 * r))
    grad_energy = grad_lp_norm(w, 2.0) ** 2
    num = float((v ** (r * s)).sum()) * g.cell_volume
    return num / (grad_energy ** ((r * s - 1.0) / r) + 1.0)


def boundary_outward_derivative_max(c: ScalarField) -> float:
    """Largest one-sided outward slope of |grad c|^2 across the first
    interior cell pair at each wall.

    At the wall itself convexity of the rectangle keeps this quantity
    nonpositive for zero-flux fields.  The cell-pair proxy adds an O(h)
    interior term, so it decays under refinement and vanishes exactly on
    steady diffusion states (constants).  A wall-handling bug (wrong ghost
    sign, stale copy) surfaces orders of magnitude above that trend, at
    the 1/h^3 scale of the corrupted gradient.
    """
    g = c.grid
    mag2 = gradient(c).center_magnitude() ** 2
    return max(
        float(((mag2[0, :] - mag2[1, :]) / g.dx).max()),
        float(((mag2[-1, :] - mag2[-2, :]) / g.dx).max()),
        float(((mag2[:, 0] - mag2[:, 1]) / g.dy).max()),
        float(((mag2[:, -1] - mag2[:, -2]) / g.dy).max()),
    )
