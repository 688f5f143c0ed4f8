"""End-to-end loop behavior: outputs, determinism, failure paths."""
import json
from dataclasses import replace

import numpy as np
import pytest

from kss2d.config import apply_overrides, load_config
from kss2d.diagnostics import Verdict
from kss2d.errors import CflError, ConfigError
from kss2d.fields import integral
from kss2d.grid import divergence, gradient
from kss2d.runner import (StepFailure, homogeneous_config, initial_fields,
                          resolve_dt, run)


def make_cfg(tmp_path, body="", name="run.cfg"):
    text = ("[grid]\nnx = 32\nny = 32\n"
            "[time]\ndt = 0.002\nt_end = 0.02\nsample_every = 5\n"
            "[output]\ndir = " + str(tmp_path / "out") + "\n"
            + body)
    p = tmp_path / name
    p.write_text(text)
    return load_config(str(p))


def test_homogeneous_constants_do_not_move(tmp_path):
    cfg = homogeneous_config(make_cfg(tmp_path, "[initial]\nn0_value = 2.0\n"))
    grid, state0, _, _ = initial_fields(cfg)
    res = run(cfg)
    assert res.verdict == Verdict.BOUNDED
    assert res.steps == 10
    drift = max(
        float(np.abs(res.state.n.values - state0.n.values).max()),
        float(np.abs(res.state.c.values - state0.c.values).max()),
        res.state.u.max_abs(),
    )
    assert drift <= 1e-12


def test_run_is_deterministic(tmp_path):
    base = make_cfg(tmp_path)
    a = run(apply_overrides(base, out=str(tmp_path / "a")))
    b = run(apply_overrides(base, out=str(tmp_path / "b")))
    csv_a = (tmp_path / "a" / "diagnostics.csv").read_bytes()
    csv_b = (tmp_path / "b" / "diagnostics.csv").read_bytes()
    assert csv_a == csv_b
    assert np.array_equal(a.state.n.values, b.state.n.values)
    assert np.array_equal(a.state.c.values, b.state.c.values)
    assert np.array_equal(a.state.u.x, b.state.u.x)
    assert np.array_equal(a.state.u.y, b.state.u.y)
    snap_a = (tmp_path / "a" / "n_10.f64").read_bytes()
    snap_b = (tmp_path / "b" / "n_10.f64").read_bytes()
    assert snap_a == snap_b


def test_resolve_dt(tmp_path):
    fixed = make_cfg(tmp_path)
    _, state, _, _ = initial_fields(fixed)
    assert resolve_dt(fixed, state) == 0.002

    auto = make_cfg(tmp_path, "[initial]\nc0 = gaussian\nc0_mass = 0.5\n",
                    name="auto.cfg")
    auto = replace(auto, dt=None)
    grid, state, _, _ = initial_fields(auto)
    gmax = gradient(state.c).max_abs()
    assert gmax > 0.0
    expect = 0.2 * min(grid.dx, grid.dy) / (1.0 + gmax + state.u.max_abs())
    assert resolve_dt(auto, state) == expect


def test_output_contract(tmp_path):
    cfg = make_cfg(tmp_path)
    res = run(cfg)
    out = tmp_path / "out"

    lines = (out / "diagnostics.csv").read_text().strip().splitlines()
    assert len(lines) == 1 + 3                      # header + samples 0, 5, 10
    assert lines[0].startswith("t,mass,")
    assert float(lines[1].split(",")[0]) == 0.0
    assert float(lines[-1].split(",")[0]) == 0.02

    meta = json.loads((out / "meta.json").read_text())
    assert meta["nx"] == 32 and meta["ny"] == 32
    assert meta["dt"] == 0.002 and meta["steps"] == 10
    assert meta["dtype"] == "float64" and meta["byte_order"] == "little"
    assert meta["snapshot_steps"] == [0, 5, 10]
    assert meta["verdict"] == res.verdict.value
    assert meta["shapes"]["ux"] == [33, 32]

    # snapshots round-trip bitwise against a rebuild of the initial state
    _, state0, _, _ = initial_fields(cfg)
    raw = np.fromfile(out / "n_0.f64", dtype="<f8").reshape(32, 32)
    assert np.array_equal(raw, state0.n.values)
    for name in ("c_10", "ux_10", "uy_10"):
        assert (out / f"{name}.f64").exists()


def test_final_time_is_exact(tmp_path):
    cfg = make_cfg(tmp_path, name="frac.cfg")
    ragged = replace(cfg, dt=0.1, t_end=0.35,
                     out_dir=str(tmp_path / "ragged"))
    res = run(homogeneous_config(ragged))
    assert res.steps == 4
    assert res.state.t == 0.35
    assert res.history[-1].t == 0.35

    even = replace(cfg, dt=0.1, t_end=0.5, out_dir=str(tmp_path / "even"))
    res = run(homogeneous_config(even))
    assert res.steps == 5
    assert res.state.t == 0.5


def test_cfl_refusal_becomes_step_failure(tmp_path):
    # signal gradient steep enough that the first step is over the limit
    cfg = make_cfg(tmp_path,
                   "[initial]\nc0 = gaussian\nc0_mass = 5.0\nc0_width = 0.02\n",
                   name="steep.cfg")
    cfg = replace(cfg, dt=0.1)
    with pytest.raises(StepFailure) as exc:
        run(cfg)
    err = exc.value
    assert err.step == 1
    assert isinstance(err.cause, CflError)
    assert len(err.history) == 1 and err.history[0].t == 0.0

    out = tmp_path / "out"
    lines = (out / "diagnostics.csv").read_text().strip().splitlines()
    assert len(lines) == 2                          # header + the t=0 sample
    meta = json.loads((out / "meta.json").read_text())
    assert meta["failed_at_step"] == 1
    assert meta["verdict"] == "bounded"


def test_blow_up_flag_halts_the_loop(tmp_path):
    cfg = make_cfg(tmp_path, "[monitor]\nblow_up_threshold = 1e-6\n",
                   name="tiny.cfg")
    cfg = replace(cfg, sample_every=1)
    res = run(cfg)
    assert res.verdict == Verdict.BLOWN_UP
    assert res.steps == 1
    assert len(res.history) == 2
    assert res.history[-1].blown_up is True
    meta = json.loads((tmp_path / "out" / "meta.json").read_text())
    assert meta["verdict"] == "blown_up"


def test_scalar_file_initial_data_roundtrips(tmp_path):
    rng = np.random.default_rng(90)
    vals = rng.uniform(0.5, 1.5, (16, 16))
    path = tmp_path / "n0.f64"
    np.ascontiguousarray(vals, dtype="<f8").tofile(path)
    cfg = make_cfg(tmp_path,
                   f"[initial]\nn0 = file\nn0_file = {path}\n", name="f.cfg")
    cfg = replace(cfg, nx=16, ny=16)
    _, state, _, _ = initial_fields(cfg)
    assert np.array_equal(state.n.values, vals)


def test_velocity_file_initial_data(tmp_path):
    rng = np.random.default_rng(91)
    ux = np.zeros((17, 16))
    uy = np.zeros((16, 17))
    ux[1:-1, :] = rng.standard_normal((15, 16))
    uy[:, 1:-1] = rng.standard_normal((16, 15))
    px, py = tmp_path / "ux.f64", tmp_path / "uy.f64"
    ux.astype("<f8").tofile(px)
    uy.astype("<f8").tofile(py)
    cfg = make_cfg(tmp_path,
                   f"[initial]\nu0 = file\nu0_file_x = {px}\n"
                   f"u0_file_y = {py}\n", name="v.cfg")
    cfg = replace(cfg, nx=16, ny=16)
    _, state, _, _ = initial_fields(cfg)
    # file velocity is projected once on load: div-free, walls intact
    assert state.u.boundary_normal_max() == 0.0
    scale = max(1.0, state.u.max_abs())
    assert float(np.abs(divergence(state.u).values).max()) <= 1e-8 * scale

    bad = ux.copy()
    bad[0, :] = 1.0                                  # inflow through a wall
    bad.astype("<f8").tofile(px)
    with pytest.raises(ConfigError, match="exactly zero"):
        initial_fields(cfg)

    np.zeros((16, 16)).astype("<f8").tofile(px)      # wrong face count
    with pytest.raises(ConfigError, match="expected 272"):
        initial_fields(cfg)


def test_gaussian_initial_mass_and_width(tmp_path):
    cfg = make_cfg(tmp_path, "[initial]\nn0_mass = 3.7\nn0_width = 0.2\n"
                   "n0_center = 0.25 0.75\n", name="g.cfg")
    _, state, _, _ = initial_fields(cfg)
    assert integral(state.n) == pytest.approx(3.7, rel=1e-13)
    assert float(state.n.values.min()) > 0.0
    peak = np.unravel_index(np.argmax(state.n.values), (32, 32))
    xc, yc = state.n.grid.center_mesh()
    assert abs(xc[peak] - 0.25) <= state.n.grid.dx
    assert abs(yc[peak] - 0.75) <= state.n.grid.dy

    bad = make_cfg(tmp_path, "[initial]\nn0_width = -0.1\n", name="w.cfg")
    with pytest.raises(ConfigError, match="n0_width"):
        initial_fields(bad)
