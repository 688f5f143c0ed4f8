"""Monitored quantities, verdicts, and the inequality self-checks."""
import numpy as np
import pytest

from conftest import cosine_series, positive_cosine_series, unit_grid
from kss2d.diagnostics import (CSV_HEADER, DiagnosticsRecord, MonitorConfig,
                               Verdict, boundary_outward_derivative_max,
                               check_gn_ratio, check_hessian_cs, check_young,
                               detect_blow_up, du_lp_norm, l1_envelope,
                               record, young_constant)
from kss2d.fields import MacVectorField, ScalarField, State, entropy


def test_monitor_config_validation():
    MonitorConfig()
    with pytest.raises(ValueError):
        MonitorConfig(p=0.5)
    with pytest.raises(ValueError):
        MonitorConfig(q=0.0)
    with pytest.raises(ValueError):
        MonitorConfig(lam=-1.0)
    with pytest.raises(ValueError):
        MonitorConfig(blow_up_threshold=0.0)
    with pytest.raises(ValueError):
        MonitorConfig(sample_every=0)


def test_csv_header_is_frozen():
    assert CSV_HEADER == ("t,mass,l1_c,linf_n,lp_n,l2q_gradc,entropy,"
                          "energy_y,l2_gradc,du_l32,linf_u,div_u_max,blown_up")


def _flat_state(g, nbar=2.0, cbar=3.0):
    return State(n=ScalarField.full(g, nbar), c=ScalarField.full(g, cbar),
                 u=MacVectorField.zeros(g), p=ScalarField.zeros(g), t=1.5)


def test_record_constant_state_values():
    g = unit_grid(16)
    st = _flat_state(g)
    rec = record(st, MonitorConfig(p=2.0, q=2.0, lam=1.0))
    assert rec.t == 1.5
    assert rec.mass == pytest.approx(2.0, rel=1e-14)
    assert rec.l1_c == pytest.approx(3.0, rel=1e-14)
    assert rec.linf_n == 2.0
    assert rec.lp_n == pytest.approx(2.0, rel=1e-14)
    assert rec.l2_gradc == 0.0 and rec.l2q_gradc == 0.0
    assert rec.entropy == pytest.approx(2.0 * np.log(2.0), rel=1e-13)
    assert rec.energy_y == pytest.approx(rec.entropy, rel=1e-13)
    assert rec.du_l32 == 0.0 and rec.linf_u == 0.0 and rec.div_u_max == 0.0
    assert rec.blown_up is False


def test_record_flags_nonfinite_state():
    g = unit_grid(8)
    st = _flat_state(g)
    st.n.values[3, 3] = np.nan
    rec = record(st, MonitorConfig())
    assert rec.blown_up is True
    assert np.isnan(rec.mass) and np.isnan(rec.linf_n)


def test_record_threshold_is_strict():
    g = unit_grid(8)
    st = _flat_state(g, nbar=100.0)
    assert record(st, MonitorConfig(blow_up_threshold=100.0)).blown_up is False
    assert record(st, MonitorConfig(blow_up_threshold=99.9)).blown_up is True


def test_csv_row_format():
    rec = record(_flat_state(unit_grid(8)), MonitorConfig())
    parts = rec.csv_row().split(",")
    assert len(parts) == 13
    assert parts[-1] == "0"
    assert parts[0] == "1.5"
    # 15 significant digits survive the round trip
    assert float(parts[1]) == rec.mass


def test_du_lp_norm_zero_and_homogeneity():
    rng = np.random.default_rng(81)
    g = unit_grid(16)
    assert du_lp_norm(MacVectorField.zeros(g), 1.5) == 0.0
    vx = rng.standard_normal((17, 16))
    vy = rng.standard_normal((16, 17))
    u = MacVectorField(grid=g, x=vx, y=vy)
    u2 = MacVectorField(grid=g, x=2.0 * vx, y=2.0 * vy)
    assert du_lp_norm(u2, 1.5) == pytest.approx(2.0 * du_lp_norm(u, 1.5),
                                                rel=1e-12)


def test_detect_blow_up_verdicts():
    def rec(t, linf, flag=False):
        return DiagnosticsRecord(t=t, mass=1.0, l1_c=1.0, linf_n=linf,
                                 lp_n=1.0, l2q_gradc=0.0, entropy=0.0,
                                 energy_y=0.0, l2_gradc=0.0, du_l32=0.0,
                                 linf_u=0.0, div_u_max=0.0, blown_up=flag)

    assert detect_blow_up([]) == Verdict.BOUNDED
    flat = [rec(0.1 * k, 5.0) for k in range(8)]
    assert detect_blow_up(flat) == Verdict.BOUNDED
    grew = [rec(k, 1.0) for k in range(5)] + [rec(5, 12.0)]
    assert detect_blow_up(grew) == Verdict.GROWING
    flagged = flat + [rec(9.0, 5.0, flag=True)]
    assert detect_blow_up(flagged) == Verdict.BLOWN_UP
    short = [rec(0, 1.0), rec(1, 50.0)]   # too few samples to call growth
    assert detect_blow_up(short) == Verdict.BOUNDED


def test_l1_envelope_values():
    y0, k0, alpha, mass, area = 5.0, 1.0, 0.5, 4.0, 1.0
    c2 = k0 * mass ** alpha * area ** (1.0 - alpha)   # = 2
    assert l1_envelope(0.0, y0, k0, alpha, mass, area) == pytest.approx(5.0)
    t = np.log(2.0)
    assert l1_envelope(t, y0, k0, alpha, mass, area) == pytest.approx(
        0.5 * y0 + 0.5 * c2, rel=1e-14)
    assert l1_envelope(50.0, y0, k0, alpha, mass, area) == pytest.approx(
        c2, rel=1e-12)
    with pytest.raises(ValueError):
        l1_envelope(-1.0, y0, k0, alpha, mass, area)
    with pytest.raises(ValueError):
        l1_envelope(1.0, y0, k0, 1.5, mass, area)


def test_young_constant_frozen_values():
    # (eps p)^(-q/p) / q, worked by hand for three corner cases
    assert young_constant(0.25, 2.0, 2.0) == pytest.approx(1.0, rel=1e-15)
    assert young_constant(0.125, 2.0, 2.0) == pytest.approx(2.0, rel=1e-15)
    assert young_constant(1.0, 4.0, 4.0 / 3.0) == pytest.approx(
        0.47247039371057745, rel=1e-14)


def test_young_constant_validation():
    with pytest.raises(ValueError):
        young_constant(0.0, 2.0, 2.0)
    with pytest.raises(ValueError):
        young_constant(1.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        young_constant(1.0, 3.0, 2.0)   # not conjugate


def test_young_equality_case_is_sharp():
    for eps, p, b in ((0.3, 1.5, 2.0), (2.0, 3.0, 0.7), (0.05, 5.0, 11.0)):
        q = p / (p - 1.0)
        c = young_constant(eps, p, q)
        a = (b / (eps * p)) ** (1.0 / (p - 1.0))
        lhs = a * b
        rhs = eps * a ** p + c * b ** q
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_check_young_bulk():
    rep = check_young(50000, rng_seed=20240817)
    assert rep.samples == 50000
    assert rep.violations == 0
    assert rep.max_ratio <= 1.0 + 1e-12
    assert rep.equality_ratio == pytest.approx(1.0, rel=1e-12)


def test_check_hessian_cs_smooth_and_rough():
    rng = np.random.default_rng(82)
    g = unit_grid(24)
    for _ in range(5):
        rep = check_hessian_cs(cosine_series(g, rng, kmax=4))
        assert rep.violations == 0 and rep.max_excess <= 0.0
    # the trace bound is algebraic, so even white noise obeys it
    rough = ScalarField(grid=g, values=rng.standard_normal(g.shape))
    rep = check_hessian_cs(rough)
    assert rep.violations == 0


def test_check_gn_ratio_refinement_stable():
    def field(n):
        g = unit_grid(n)
        xc, yc = g.center_mesh()
        return ScalarField(grid=g, values=1.5 + np.cos(np.pi * xc)
                           * np.cos(np.pi * yc))

    r32 = check_gn_ratio(field(32), 2.0, 2.0)
    r64 = check_gn_ratio(field(64), 2.0, 2.0)
    assert r32 > 0.0 and np.isfinite(r32)
    assert abs(r64 - r32) <= 0.02 * r32
    with pytest.raises(ValueError):
        check_gn_ratio(field(16), 0.5, 2.0)


def test_boundary_derivative_zero_on_steady_and_axis_aligned_fields():
    g = unit_grid(32)
    assert boundary_outward_derivative_max(ScalarField.full(g, 3.7)) == 0.0
    xc, _ = g.center_mesh()
    xonly = ScalarField(grid=g,
                        values=np.cos(2.0 * np.pi * xc) * np.ones(g.shape))
    assert boundary_outward_derivative_max(xonly) == 0.0


def test_boundary_derivative_decays_under_refinement():
    def mode(m):
        g = unit_grid(m)
        xc, yc = g.center_mesh()
        return ScalarField(grid=g, values=np.cos(3.0 * np.pi * xc)
                           * np.cos(2.0 * np.pi * yc))

    v32 = boundary_outward_derivative_max(mode(32))
    v64 = boundary_outward_derivative_max(mode(64))
    assert v32 > 0.0
    assert v64 <= 0.7 * v32     # measured ratio ~ 0.52, first order in h


def test_boundary_derivative_flags_wall_corruption():
    rng = np.random.default_rng(85)
    g = unit_grid(32)
    c = positive_cosine_series(g, rng)
    clean = boundary_outward_derivative_max(c)
    broken = c.copy()
    # a sawtooth glued onto the wall row, the signature of a ghost-sign bug
    bump = 20.0 * float(broken.values.max())
    broken.values[0, :] += bump * (-1.0) ** np.arange(g.ny)
    dirty = boundary_outward_derivative_max(broken)
    assert dirty > 100.0 * max(abs(clean), 1.0)


def test_entropy_matches_record():
    rng = np.random.default_rng(84)
    g = unit_grid(16)
    n = positive_cosine_series(g, rng)
    st = State(n=n, c=ScalarField.zeros(g), u=MacVectorField.zeros(g),
               p=ScalarField.zeros(g), t=0.0)
    rec = record(st, MonitorConfig(lam=1.0))
    assert rec.entropy == pytest.approx(entropy(n), rel=1e-14)
    assert rec.energy_y == pytest.approx(entropy(n) + rec.l2_gradc, rel=1e-13)
