"""Vectorized numpy implementations of the hot kernels.

This is the reference backend: every function here has an njit twin in
kernels_numba.py with the same signature and semantics.  The numba twins are
loop-level rewrites of these, so any fix must land in both files.

Conventions: cell arrays are (nx, ny), x-face arrays (nx+1, ny), y-face
arrays (nx, ny+1).  All kernels are pure (inputs untouched) except the
in-place smoother/prolongation used by the multigrid driver.
"""
from __future__ import annotations

import numpy as np


# ---------------------------------------------------------------------------
# explicit transport
# ---------------------------------------------------------------------------

def transport_nstar(n, c, ux, uy, dx, dy, dt):
    """Upwind transport stage of the density update.

    Returns (nstar, gmax, umax) where nstar = n - dt div(F) with
    F = n_up grad(c) + n_up u on interior faces (each term donor-cell
    upwinded on its own face velocity, boundary faces carry no flux), and
    gmax/umax are the largest face speeds for the caller's CFL check.
    """
    gx = (c[1:, :] - c[:-1, :]) / dx          # interior x-faces only
    gy = (c[:, 1:] - c[:, :-1]) / dy
    gmax = max(float(np.abs(gx).max()), float(np.abs(gy).max()))
    umax = max(float(np.abs(ux).max()), float(np.abs(uy).max()))

    fx = np.zeros_like(ux)
    fy = np.zeros_like(uy)
    uxi = ux[1:-1, :]
    uyi = uy[:, 1:-1]
    fx[1:-1, :] = (np.where(gx > 0.0, n[:-1, :], n[1:, :]) * gx
                   + np.where(uxi > 0.0, n[:-1, :], n[1:, :]) * uxi)
    fy[:, 1:-1] = (np.where(gy > 0.0, n[:, :-1], n[:, 1:]) * gy
                   + np.where(uyi > 0.0, n[:, :-1], n[:, 1:]) * uyi)

    div = (fx[1:, :] - fx[:-1, :]) / dx + (fy[:, 1:] - fy[:, :-1]) / dy
    return n - dt * div, gmax, umax


def signal_cstar(c, ux, uy, prod, dx, dy, dt):
    """Explicit stage of the signal update.

    cstar = c - dt div(u c_up) + dt prod, conservative upwind advection on
    the (discretely divergence-free) velocity.  Returns (cstar, umax).
    """
    umax = max(float(np.abs(ux).max()), float(np.abs(uy).max()))
    fx = np.zeros_like(ux)
    fy = np.zeros_like(uy)
    uxi = ux[1:-1, :]
    uyi = uy[:, 1:-1]
    fx[1:-1, :] = np.where(uxi > 0.0, c[:-1, :], c[1:, :]) * uxi
    fy[:, 1:-1] = np.where(uyi > 0.0, c[:, :-1], c[:, 1:]) * uyi
    div = (fx[1:, :] - fx[:-1, :]) / dx + (fy[:, 1:] - fy[:, :-1]) / dy
    return c - dt * div + dt * prod, umax


# ---------------------------------------------------------------------------
# cell-centered Helmholtz operator and CG
# ---------------------------------------------------------------------------

def lap_cell_neumann(x, dx, dy):
    """Five-point Laplacian with mirror ghosts (zero-flux walls)."""
    p = np.pad(x, 1, mode="edge")
    return ((p[2:, 1:-1] - 2.0 * x + p[:-2, 1:-1]) / (dx * dx)
            + (p[1:-1, 2:] - 2.0 * x + p[1:-1, :-2]) / (dy * dy))


def _apply_helm_cell(a, b, dx, dy, x):
    return a * x - b * lap_cell_neumann(x, dx, dy)


def cg_cell(a, b, dx, dy, rhs, x0, tol, maxiter):
    """Conjugate gradients for a x - b lap(x) = rhs, zero-flux walls.

    Requires a > 0 or (a == 0 with b < 0 ... not supported); for the pure
    Neumann Poisson use poisson form b < 0 handled by the caller.  Returns
    (x, iters, relres) with relres = |rhs - A x|_2 / |rhs|_2.
    """
    bnorm = float(np.sqrt((rhs * rhs).sum()))
    if bnorm == 0.0:
        return np.zeros_like(rhs), 0, 0.0
    x = x0.copy()
    r = rhs - _apply_helm_cell(a, b, dx, dy, x)
    rs = float((r * r).sum())
    if np.sqrt(rs) <= tol * bnorm:
        return x, 0, float(np.sqrt(rs)) / bnorm
    p = r.copy()
    for k in range(1, int(maxiter) + 1):
        ap = _apply_helm_cell(a, b, dx, dy, p)
        pap = float((p * ap).sum())
        if pap <= 0.0:
            break
        alpha = rs / pap
        x += alpha * p
        r -= alpha * ap
        rs_new = float((r * r).sum())
        if np.sqrt(rs_new) <= tol * bnorm:
            return x, k, float(np.sqrt(rs_new)) / bnorm
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x, int(maxiter), float(np.sqrt(rs)) / bnorm


# ---------------------------------------------------------------------------
# face-centered viscous operators and CG (no-slip walls)
# ---------------------------------------------------------------------------

def _apply_visc_x(dt, dx, dy, v):
    """(I - dt lap) on x-face data; normal boundary faces pinned to zero,
    tangential walls via antisymmetric ghosts."""
    out = np.zeros_like(v)
    inner = v[1:-1, :]
    lapx = (v[2:, :] - 2.0 * inner + v[:-2, :]) / (dx * dx)
    p = np.pad(inner, ((0, 0), (1, 1)), mode="edge")
    p[:, 0] *= -1.0
    p[:, -1] *= -1.0
    lapy = (p[:, 2:] - 2.0 * inner + p[:, :-2]) / (dy * dy)
    out[1:-1, :] = inner - dt * (lapx + lapy)
    return out


def _apply_visc_y(dt, dx, dy, v):
    out = np.zeros_like(v)
    inner = v[:, 1:-1]
    lapy = (v[:, 2:] - 2.0 * inner + v[:, :-2]) / (dy * dy)
    p = np.pad(inner, ((1, 1), (0, 0)), mode="edge")
    p[0, :] *= -1.0
    p[-1, :] *= -1.0
    lapx = (p[2:, :] - 2.0 * inner + p[:-2, :]) / (dx * dx)
    out[:, 1:-1] = inner - dt * (lapx + lapy)
    return out


def _pin_x(v, rhs=None):
    # boundary-normal faces are Dirichlet data, not unknowns
    v[0, :] = 0.0 if rhs is None else rhs[0, :]
    v[-1, :] = 0.0 if rhs is None else rhs[-1, :]


def _pin_y(v, rhs=None):
    v[:, 0] = 0.0 if rhs is None else rhs[:, 0]
    v[:, -1] = 0.0 if rhs is None else rhs[:, -1]


def _cg_faces(apply_op, pin, dt, dx, dy, rhs, x0, tol, maxiter):
    bnorm = float(np.sqrt((rhs * rhs).sum()))
    if bnorm == 0.0:
        return np.zeros_like(rhs), 0, 0.0
    x = x0.copy()
    pin(x, rhs)
    r = rhs - apply_op(dt, dx, dy, x)
    pin(r)
    rs = float((r * r).sum())
    if np.sqrt(rs) <= tol * bnorm:
        return x, 0, float(np.sqrt(rs)) / bnorm
    p = r.copy()
    for k in range(1, int(maxiter) + 1):
        ap = apply_op(dt, dx, dy, p)
        pap = float((p * ap).sum())
        if pap <= 0.0:
            break
        alpha = rs / pap
        x += alpha * p
        r -= alpha * ap
        rs_new = float((r * r).sum())
        if np.sqrt(rs_new) <= tol * bnorm:
            return x, k, float(np.sqrt(rs_new)) / bnorm
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x, int(maxiter), float(np.sqrt(rs)) / bnorm


def cg_facex(dt, dx, dy, rhs, x0, tol, maxiter):
    """CG for the x-component viscous solve.  The boundary-normal faces
    (first and last row) are carried over from rhs unchanged."""
    return _cg_faces(_apply_visc_x, _pin_x, dt, dx, dy, rhs, x0, tol, maxiter)


def cg_facey(dt, dx, dy, rhs, x0, tol, maxiter):
    return _cg_faces(_apply_visc_y, _pin_y, dt, dx, dy, rhs, x0, tol, maxiter)


# ---------------------------------------------------------------------------
# multigrid components for the Neumann Poisson solve
# ---------------------------------------------------------------------------

def _neumann_diag(nx, ny, dx, dy):
    idx2 = 1.0 / (dx * dx)
    idy2 = 1.0 / (dy * dy)
    diag = np.full((nx, ny), -2.0 * idx2 - 2.0 * idy2)
    diag[0, :] += idx2
    diag[-1, :] += idx2
    diag[:, 0] += idy2
    diag[:, -1] += idy2
    return diag


def rbgs_sweep(x, b, dx, dy):
    """One red-black Gauss-Seidel sweep (in place) for lap(x) = b."""
    nx, ny = x.shape
    diag = _neumann_diag(nx, ny, dx, dy)
    ii, jj = np.indices((nx, ny))
    red = (ii + jj) % 2 == 0
    for mask in (red, ~red):
        off = lap_cell_neumann(x, dx, dy) - diag * x
        x[mask] = ((b - off) / diag)[mask]


def residual_cell(x, b, dx, dy):
    return b - lap_cell_neumann(x, dx, dy)


def restrict_fw(r):
    """Full-weighting restriction for cell-centered grids (2x2 average).
    Requires even dimensions."""
    return 0.25 * (r[0::2, 0::2] + r[1::2, 0::2] + r[0::2, 1::2] + r[1::2, 1::2])


def prolong_add(e, x):
    """Bilinear cell-centered prolongation of the coarse correction e,
    added into the fine array x in place.  Edge cells clamp the missing
    neighbor (mirror-consistent)."""
    p = np.pad(e, 1, mode="edge")
    center = p[1:-1, 1:-1]
    for di in (0, 1):
        sx = slice(2, None) if di else slice(0, -2)
        ex = p[sx, 1:-1]
        for dj in (0, 1):
            sy = slice(2, None) if dj else slice(0, -2)
            ey = p[1:-1, sy]
            exy = p[sx, sy]
            x[di::2, dj::2] += (9.0 * center + 3.0 * ex + 3.0 * ey + exy) / 16.0
