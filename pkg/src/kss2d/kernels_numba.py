"""numba twins of the hot kernels.

Same signatures and semantics as kernels_numpy; bodies are serial loop
rewrites.  Serial on purpose: reductions stay deterministic, which the
byte-identical-output guarantee depends on, and the grids involved are small
enough that threading would mostly buy overhead.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def transport_nstar(n, c, ux, uy, dx, dy, dt):
    nx, ny = n.shape
    fx = np.zeros((nx + 1, ny))
    fy = np.zeros((nx, ny + 1))
    gmax = 0.0
    umax = 0.0
    for i in range(nx + 1):
        for j in range(ny):
            a = abs(ux[i, j])
            if a > umax:
                umax = a
    for i in range(nx):
        for j in range(ny + 1):
            a = abs(uy[i, j])
            if a > umax:
                umax = a
    for i in range(1, nx):
        for j in range(ny):
            g = (c[i, j] - c[i - 1, j]) / dx
            if abs(g) > gmax:
                gmax = abs(g)
            u = ux[i, j]
            f = (n[i - 1, j] if g > 0.0 else n[i, j]) * g
            f += (n[i - 1, j] if u > 0.0 else n[i, j]) * u
            fx[i, j] = f
    for i in range(nx):
        for j in range(1, ny):
            g = (c[i, j] - c[i, j - 1]) / dy
            if abs(g) > gmax:
                gmax = abs(g)
            u = uy[i, j]
            f = (n[i, j - 1] if g > 0.0 else n[i, j]) * g
            f += (n[i, j - 1] if u > 0.0 else n[i, j]) * u
            fy[i, j] = f
    nstar = np.empty((nx, ny))
    for i in range(nx):
        for j in range(ny):
            div = ((fx[i + 1, j] - fx[i, j]) / dx
                   + (fy[i, j + 1] - fy[i, j]) / dy)
            nstar[i, j] = n[i, j] - dt * div
    return nstar, gmax, umax


@njit(cache=True)
def signal_cstar(c, ux, uy, prod, dx, dy, dt):
    nx, ny = c.shape
    fx = np.zeros((nx + 1, ny))
    fy = np.zeros((nx, ny + 1))
    umax = 0.0
    for i in range(nx + 1):
        for j in range(ny):
            a = abs(ux[i, j])
            if a > umax:
                umax = a
    for i in range(nx):
        for j in range(ny + 1):
            a = abs(uy[i, j])
            if a > umax:
                umax = a
    for i in range(1, nx):
        for j in range(ny):
            u = ux[i, j]
            fx[i, j] = (c[i - 1, j] if u > 0.0 else c[i, j]) * u
    for i in range(nx):
        for j in range(1, ny):
            u = uy[i, j]
            fy[i, j] = (c[i, j - 1] if u > 0.0 else c[i, j]) * u
    cstar = np.empty((nx, ny))
    for i in range(nx):
        for j in range(ny):
            div = ((fx[i + 1, j] - fx[i, j]) / dx
                   + (fy[i, j + 1] - fy[i, j]) / dy)
            cstar[i, j] = c[i, j] - dt * div + dt * prod[i, j]
    return cstar, umax


@njit(cache=True)
def lap_cell_neumann(x, dx, dy):
    nx, ny = x.shape
    idx2 = 1.0 / (dx * dx)
    idy2 = 1.0 / (dy * dy)
    out = np.empty((nx, ny))
    for i in range(nx):
        for j in range(ny):
            xc = x[i, j]
            lap = 0.0
            if i > 0:
                lap += (x[i - 1, j] - xc) * idx2
            if i < nx - 1:
                lap += (x[i + 1, j] - xc) * idx2
            if j > 0:
                lap += (x[i, j - 1] - xc) * idy2
            if j < ny - 1:
                lap += (x[i, j + 1] - xc) * idy2
            out[i, j] = lap
    return out


@njit(cache=True)
def _apply_helm_cell(a, b, dx, dy, x, out):
    nx, ny = x.shape
    idx2 = 1.0 / (dx * dx)
    idy2 = 1.0 / (dy * dy)
    for i in range(nx):
        for j in range(ny):
            xc = x[i, j]
            lap = 0.0
            if i > 0:
                lap += (x[i - 1, j] - xc) * idx2
            if i < nx - 1:
                lap += (x[i + 1, j] - xc) * idx2
            if j > 0:
                lap += (x[i, j - 1] - xc) * idy2
            if j < ny - 1:
                lap += (x[i, j + 1] - xc) * idy2
            out[i, j] = a * xc - b * lap


@njit(cache=True)
def cg_cell(a, b, dx, dy, rhs, x0, tol, maxiter):
    nx, ny = rhs.shape
    bnorm2 = 0.0
    for i in range(nx):
        for j in range(ny):
            bnorm2 += rhs[i, j] * rhs[i, j]
    if bnorm2 == 0.0:
        return np.zeros((nx, ny)), 0, 0.0
    bnorm = np.sqrt(bnorm2)
    x = x0.copy()
    r = np.empty((nx, ny))
    p = np.empty((nx, ny))
    ap = np.empty((nx, ny))
    _apply_helm_cell(a, b, dx, dy, x, ap)
    rs = 0.0
    for i in range(nx):
        for j in range(ny):
            r[i, j] = rhs[i, j] - ap[i, j]
            p[i, j] = r[i, j]
            rs += r[i, j] * r[i, j]
    if np.sqrt(rs) <= tol * bnorm:
        return x, 0, np.sqrt(rs) / bnorm
    for k in range(1, int(maxiter) + 1):
        _apply_helm_cell(a, b, dx, dy, p, ap)
        pap = 0.0
        for i in range(nx):
            for j in range(ny):
                pap += p[i, j] * ap[i, j]
        if pap <= 0.0:
            break
        alpha = rs / pap
        rs_new = 0.0
        for i in range(nx):
            for j in range(ny):
                x[i, j] += alpha * p[i, j]
                r[i, j] -= alpha * ap[i, j]
                rs_new += r[i, j] * r[i, j]
        if np.sqrt(rs_new) <= tol * bnorm:
            return x, k, np.sqrt(rs_new) / bnorm
        beta = rs_new / rs
        for i in range(nx):
            for j in range(ny):
                p[i, j] = r[i, j] + beta * p[i, j]
        rs = rs_new
    return x, int(maxiter), np.sqrt(rs) / bnorm


@njit(cache=True)
def _apply_visc_x(dt, dx, dy, v, out):
    nxp, ny = v.shape
    nx = nxp - 1
    idx2 = 1.0 / (dx * dx)
    idy2 = 1.0 / (dy * dy)
    for j in range(ny):
        out[0, j] = 0.0
        out[nx, j] = 0.0
    for i in range(1, nx):
        for j in range(ny):
            vc = v[i, j]
            lap = (v[i - 1, j] - 2.0 * vc + v[i + 1, j]) * idx2
            vs = -vc if j == 0 else v[i, j - 1]
            vn = -vc if j == ny - 1 else v[i, j + 1]
            lap += (vs - 2.0 * vc + vn) * idy2
            out[i, j] = vc - dt * lap
    return out


@njit(cache=True)
def _apply_visc_y(dt, dx, dy, v, out):
    nx, nyp = v.shape
    ny = nyp - 1
    idx2 = 1.0 / (dx * dx)
    idy2 = 1.0 / (dy * dy)
    for i in range(nx):
        out[i, 0] = 0.0
        out[i, ny] = 0.0
    for i in range(nx):
        for j in range(1, ny):
            vc = v[i, j]
            lap = (v[i, j - 1] - 2.0 * vc + v[i, j + 1]) * idy2
            vw = -vc if i == 0 else v[i - 1, j]
            ve = -vc if i == nx - 1 else v[i + 1, j]
            lap += (vw - 2.0 * vc + ve) * idx2
            out[i, j] = vc - dt * lap
    return out


@njit(cache=True)
def _cg_faces_impl(which_x, dt, dx, dy, rhs, x0, tol, maxiter):
    sh = rhs.shape
    bnorm2 = 0.0
    for i in range(sh[0]):
        for j in range(sh[1]):
            bnorm2 += rhs[i, j] * rhs[i, j]
    if bnorm2 == 0.0:
        return np.zeros(sh), 0, 0.0
    bnorm = np.sqrt(bnorm2)
    x = x0.copy()
    # boundary-normal faces are Dirichlet data: carried over from rhs,
    # excluded from the Krylov space
    if which_x:
        for j in range(sh[1]):
            x[0, j] = rhs[0, j]
            x[sh[0] - 1, j] = rhs[sh[0] - 1, j]
    else:
        for i in range(sh[0]):
            x[i, 0] = rhs[i, 0]
            x[i, sh[1] - 1] = rhs[i, sh[1] - 1]
    r = np.empty(sh)
    p = np.empty(sh)
    ap = np.empty(sh)
    if which_x:
        _apply_visc_x(dt, dx, dy, x, ap)
    else:
        _apply_visc_y(dt, dx, dy, x, ap)
    for i in range(sh[0]):
        for j in range(sh[1]):
            r[i, j] = rhs[i, j] - ap[i, j]
    if which_x:
        for j in range(sh[1]):
            r[0, j] = 0.0
            r[sh[0] - 1, j] = 0.0
    else:
        for i in range(sh[0]):
            r[i, 0] = 0.0
            r[i, sh[1] - 1] = 0.0
    rs = 0.0
    for i in range(sh[0]):
        for j in range(sh[1]):
            p[i, j] = r[i, j]
            rs += r[i, j] * r[i, j]
    if np.sqrt(rs) <= tol * bnorm:
        return x, 0, np.sqrt(rs) / bnorm
    for k in range(1, int(maxiter) + 1):
        if which_x:
            _apply_visc_x(dt, dx, dy, p, ap)
        else:
            _apply_visc_y(dt, dx, dy, p, ap)
        pap = 0.0
        for i in range(sh[0]):
            for j in range(sh[1]):
                pap += p[i, j] * ap[i, j]
        if pap <= 0.0:
            break
        alpha = rs / pap
        rs_new = 0.0
        for i in range(sh[0]):
            for j in range(sh[1]):
                x[i, j] += alpha * p[i, j]
                r[i, j] -= alpha * ap[i, j]
                rs_new += r[i, j] * r[i, j]
        if np.sqrt(rs_new) <= tol * bnorm:
            return x, k, np.sqrt(rs_new) / bnorm
        beta = rs_new / rs
        for i in range(sh[0]):
            for j in range(sh[1]):
                p[i, j] = r[i, j] + beta * p[i, j]
        rs = rs_new
    return x, int(maxiter), np.sqrt(rs) / bnorm


@njit(cache=True)
def cg_facex(dt, dx, dy, rhs, x0, tol, maxiter):
    return _cg_faces_impl(True, dt, dx, dy, rhs, x0, tol, maxiter)


@njit(cache=True)
def cg_facey(dt, dx, dy, rhs, x0, tol, maxiter):
    return _cg_faces_impl(False, dt, dx, dy, rhs, x0, tol, maxiter)


# ---------------------------------------------------------------------------
# multigrid components
# ---------------------------------------------------------------------------

@njit(cache=True)
def rbgs_sweep(x, b, dx, dy):
    nx, ny = x.shape
    idx2 = 1.0 / (dx * dx)
    idy2 = 1.0 / (dy * dy)
    for color in range(2):
        for i in range(nx):
            for j in range((i + color) % 2, ny, 2):
                s = 0.0
                d = 0.0
                if i > 0:
                    s += x[i - 1, j] * idx2
                    d -= idx2
                if i < nx - 1:
                    s += x[i + 1, j] * idx2
                    d -= idx2
                if j > 0:
                    s += x[i, j - 1] * idy2
                    d -= idy2
                if j < ny - 1:
                    s += x[i, j + 1] * idy2
                    d -= idy2
                x[i, j] = (b[i, j] - s) / d


@njit(cache=True)
def residual_cell(x, b, dx, dy):
    nx, ny = x.shape
    idx2 = 1.0 / (dx * dx)
    idy2 = 1.0 / (dy * dy)
    out = np.empty((nx, ny))
    for i in range(nx):
        for j in range(ny):
            xc = x[i, j]
            lap = 0.0
            if i > 0:
                lap += (x[i - 1, j] - xc) * idx2
            if i < nx - 1:
                lap += (x[i + 1, j] - xc) * idx2
            if j > 0:
                lap += (x[i, j - 1] - xc) * idy2
            if j < ny - 1:
                lap += (x[i, j + 1] - xc) * idy2
            out[i, j] = b[i, j] - lap
    return out


@njit(cache=True)
def restrict_fw(r):
    nx, ny = r.shape
    ncx = nx // 2
    ncy = ny // 2
    out = np.empty((ncx, ncy))
    for i in range(ncx):
        for j in range(ncy):
            out[i, j] = 0.25 * (r[2 * i, 2 * j] + r[2 * i + 1, 2 * j]
                                + r[2 * i, 2 * j + 1] + r[2 * i + 1, 2 * j + 1])
    return out


@njit(cache=True)
def prolong_add(e, x):
    ncx, ncy = e.shape
    nx, ny = x.shape
    for i in range(nx):
        ic = i // 2
        inb = ic - 1 if i % 2 == 0 else ic + 1
        if inb < 0:
            inb = 0
        if inb > ncx - 1:
            inb = ncx - 1
        for j in range(ny):
            jc = j // 2
            jnb = jc - 1 if j % 2 == 0 else jc + 1
            if jnb < 0:
                jnb = 0
            if jnb > ncy - 1:
                jnb = ncy - 1
            x[i, j] += (9.0 * e[ic, jc] + 3.0 * e[inb, jc]
                        + 3.0 * e[ic, jnb] + e[inb, jnb]) / 16.0
