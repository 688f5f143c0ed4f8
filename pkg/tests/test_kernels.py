"""The numba and numpy kernel implementations must agree.

Bitwise identity is not expected (summation order differs between the
vectorized and the loop form), so comparisons are tight allclose checks.
The backend is restored after every test regardless of outcome.
"""
import numpy as np
import pytest

from conftest import (cosine_series, interior_mac, positive_cosine_series,
                      random_divfree, unit_grid)
from kss2d import kernels as K

pytestmark = pytest.mark.skipif(not K.HAS_NUMBA,
                                reason="numba backend not importable")


@pytest.fixture(autouse=True)
def _restore_backend():
    prev = K.active_backend()
    yield
    K.set_backend(prev)


def _per_backend(fn):
    out = {}
    for name in ("numpy", "numba"):
        K.set_backend(name)
        out[name] = fn()
    return out["numpy"], out["numba"]


def test_backend_selection_contract():
    K.set_backend("numpy")
    assert K.active_backend() == "numpy"
    K.set_backend("numba")
    assert K.active_backend() == "numba"
    with pytest.raises(ValueError):
        K.set_backend("fortran")
    with pytest.raises(AttributeError):
        K.no_such_kernel


def test_transport_nstar_agrees():
    rng = np.random.default_rng(21)
    g = unit_grid(24, 16)
    n = positive_cosine_series(g, rng).values
    c = cosine_series(g, rng).values
    u = random_divfree(g, rng, amp=0.4)
    run = lambda: K.transport_nstar(n.copy(), c.copy(), u.x.copy(),
                                    u.y.copy(), g.dx, g.dy, 1e-3)
    (a, ga, ua), (b, gb, ub) = _per_backend(run)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-14)
    assert ga == pytest.approx(gb, rel=1e-13)
    assert ua == pytest.approx(ub, rel=1e-13)


def test_signal_cstar_agrees():
    rng = np.random.default_rng(22)
    g = unit_grid(24, 16)
    c = positive_cosine_series(g, rng).values
    prod = positive_cosine_series(g, rng).values
    u = random_divfree(g, rng, amp=0.4)
    run = lambda: K.signal_cstar(c.copy(), u.x.copy(), u.y.copy(),
                                 prod.copy(), g.dx, g.dy, 2e-3)
    (a, ua), (b, ub) = _per_backend(run)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-14)
    assert ua == pytest.approx(ub, rel=1e-13)


def test_lap_cell_neumann_agrees():
    rng = np.random.default_rng(23)
    g = unit_grid(20, 28)
    x = rng.standard_normal(g.shape)
    run = lambda: K.lap_cell_neumann(x.copy(), g.dx, g.dy)
    a, b = _per_backend(run)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-11)


def test_cg_cell_agrees_and_converges():
    rng = np.random.default_rng(24)
    g = unit_grid(24)
    rhs = cosine_series(g, rng, kmax=4).values
    x0 = np.zeros_like(rhs)
    run = lambda: K.cg_cell(1.0, 5e-3, g.dx, g.dy, rhs.copy(), x0.copy(),
                            1e-12, 4000)
    (xa, ia, ra), (xb, ib, rb) = _per_backend(run)
    assert ra <= 1e-12 and rb <= 1e-12
    assert np.allclose(xa, xb, rtol=1e-9, atol=1e-12)


def test_cg_faces_agree_and_pin_boundary_rows():
    # boundary-normal faces are Dirichlet data: carried over from the rhs
    # exactly, never entering the Krylov space
    rng = np.random.default_rng(25)
    g = unit_grid(20, 12)
    rhs_x = rng.standard_normal((21, 12))
    rhs_y = rng.standard_normal((20, 13))
    run_x = lambda: K.cg_facex(1e-2, g.dx, g.dy, rhs_x.copy(),
                               np.zeros_like(rhs_x), 1e-12, 4000)
    run_y = lambda: K.cg_facey(1e-2, g.dx, g.dy, rhs_y.copy(),
                               np.zeros_like(rhs_y), 1e-12, 4000)
    (xa, _, ra), (xb, _, rb) = _per_backend(run_x)
    assert ra <= 1e-12 and rb <= 1e-12
    for x in (xa, xb):
        assert np.array_equal(x[0, :], rhs_x[0, :])
        assert np.array_equal(x[-1, :], rhs_x[-1, :])
    assert np.allclose(xa, xb, rtol=1e-9, atol=1e-12)
    (ya, _, sa), (yb, _, sb) = _per_backend(run_y)
    assert sa <= 1e-12 and sb <= 1e-12
    for y in (ya, yb):
        assert np.array_equal(y[:, 0], rhs_y[:, 0])
        assert np.array_equal(y[:, -1], rhs_y[:, -1])
    assert np.allclose(ya, yb, rtol=1e-9, atol=1e-12)


def test_rbgs_sweep_agrees():
    rng = np.random.default_rng(26)
    g = unit_grid(16, 16)
    b = rng.standard_normal(g.shape)
    b -= b.mean()
    x0 = rng.standard_normal(g.shape)

    def run():
        x = x0.copy()
        K.rbgs_sweep(x, b, g.dx, g.dy)
        K.rbgs_sweep(x, b, g.dx, g.dy)
        return x

    a, c = _per_backend(run)
    assert np.allclose(a, c, rtol=1e-13, atol=1e-13)


def test_residual_restrict_prolong_agree():
    rng = np.random.default_rng(27)
    g = unit_grid(16, 24)
    x = rng.standard_normal(g.shape)
    b = rng.standard_normal(g.shape)
    ra, rb = _per_backend(lambda: K.residual_cell(x.copy(), b.copy(),
                                                  g.dx, g.dy))
    assert np.allclose(ra, rb, rtol=1e-13, atol=1e-12)
    ca, cb = _per_backend(lambda: K.restrict_fw(ra.copy()))
    assert ca.shape == (8, 12)
    assert np.allclose(ca, cb, rtol=1e-13, atol=1e-13)
    e = rng.standard_normal((8, 12))

    def up():
        tgt = x.copy()
        K.prolong_add(e.copy(), tgt)
        return tgt

    pa, pb = _per_backend(up)
    assert np.allclose(pa, pb, rtol=1e-13, atol=1e-13)


def test_transport_nstar_pure_diffusion_free():
    # zero velocity and flat signal leave the field untouched
    g = unit_grid(12)
    n = np.full(g.shape, 3.0)
    K.set_backend("numpy")
    out, gmax, umax = K.transport_nstar(n, np.zeros(g.shape),
                                        np.zeros((13, 12)),
                                        np.zeros((12, 13)),
                                        g.dx, g.dy, 1e-2)
    assert np.array_equal(out, n)
    assert gmax == 0.0 and umax == 0.0
