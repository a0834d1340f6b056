"""Pure-Python implementations of the hot kernels.

``_ckernels.pyx`` mirrors these functions statement for statement, so both
backends perform the same floating-point operations in the same order.
Scalar arithmetic deliberately uses ``math`` on Python floats, not numpy.
"""
from __future__ import annotations

import math

import numpy as np

# field classes, shared with eigen.py
ZERO, NULL, PURE_E, PURE_B, SUB_MAGNETIC, SUPER_ELECTRIC, GENERIC = range(7)

# retarded-time status codes
OK, NO_INTERSECTION, SINGULAR_RAY, AMBIGUOUS = range(4)

NAN = float("nan")


# ---------------------------------------------------------------- eigenvectors

def solve_eigen(Ex, Ey, Ez, Bx, By, Bz, q, deg_tol):
    """Classify one field point and return its admissible velocities.

    Returns ``(cls, capture, nvel, ep, vpx, vpy, vpz, em, vmx, vmy, vmz)``.
    ``nvel`` is 0 (unconstrained or none), 1 (null field) or 2.
    """
    EE = Ex * Ex + Ey * Ey + Ez * Ez
    BB = Bx * Bx + By * By + Bz * Bz
    EB = Ex * Bx + Ey * By + Ez * Bz
    S = EE + BB
    cx = Ey * Bz - Ez * By
    cy = Ez * Bx - Ex * Bz
    cz = Ex * By - Ey * Bx
    ep = em = NAN
    vpx = vpy = vpz = vmx = vmy = vmz = NAN
    capture = 0
    nvel = 2

    if S < deg_tol * deg_tol:
        return ZERO, 0, 0, ep, vpx, vpy, vpz, em, vmx, vmy, vmz

    if abs(EB) < deg_tol * S:
        d = BB - EE
        if d > deg_tol * S:
            capture = 1
        if abs(d) < deg_tol * S:
            cls = NULL
            nvel = 1
            ep = 0.0
            vpx = cx / BB
            vpy = cy / BB
            vpz = cz / BB
        elif EE < deg_tol * deg_tol * S:
            cls = PURE_B
            w = math.sqrt(BB)
            ep = 0.0
            em = 0.0
            vpx = Bx / w
            vpy = By / w
            vpz = Bz / w
            vmx = -vpx
            vmy = -vpy
            vmz = -vpz
        elif BB < deg_tol * deg_tol * S:
            cls = PURE_E
            w = math.sqrt(EE)
            ep = q * w
            em = -(q * w)
            vpx = Ex / w
            vpy = Ey / w
            vpz = Ez / w
            vmx = -vpx
            vmy = -vpy
            vmz = -vpz
        elif d > 0.0:
            cls = SUB_MAGNETIC
            w = math.sqrt(d)
            ep = 0.0
            em = 0.0
            vpx = (cx + Bx * w) / BB
            vpy = (cy + By * w) / BB
            vpz = (cz + Bz * w) / BB
            vmx = (cx - Bx * w) / BB
            vmy = (cy - By * w) / BB
            vmz = (cz - Bz * w) / BB
        else:
            cls = SUPER_ELECTRIC
            w = math.sqrt(-d)
            ep = q * w
            em = -(q * w)
            vpx = (cx + Ex * w) / EE
            vpy = (cy + Ey * w) / EE
            vpz = (cz + Ez * w) / EE
            vmx = (cx - Ex * w) / EE
            vmy = (cy - Ey * w) / EE
            vmz = (cz - Ez * w) / EE
        return cls, capture, nvel, ep, vpx, vpy, vpz, em, vmx, vmy, vmz

    d = BB - EE
    mu = math.sqrt(d * d + 4.0 * (EB * EB))
    aEB = abs(EB)
    # take the cancellation-free root directly, the other from lam*nu = |E.B|
    if d <= 0.0:
        lam = math.sqrt((mu - d) / 2.0)
        nu = aEB / lam
    else:
        nu = math.sqrt((d + mu) / 2.0)
        lam = aEB / nu
    sigma = (S + mu) / 2.0
    kn = nu if EB > 0.0 else -nu
    px = lam * Ex + kn * Bx
    py = lam * Ey + kn * By
    pz = lam * Ez + kn * Bz
    ep = q * lam
    em = -(q * lam)
    vpx = (cx + px) / sigma
    vpy = (cy + py) / sigma
    vpz = (cz + pz) / sigma
    vmx = (cx - px) / sigma
    vmy = (cy - py) / sigma
    vmz = (cz - pz) / sigma
    return GENERIC, 0, 2, ep, vpx, vpy, vpz, em, vmx, vmy, vmz


def eigen_batch(E, B, q, deg_tol):
    """Vector version of :func:`solve_eigen` over arrays of shape (n, 3).

    Returns ``(cls, capture, nvel, edot, vel)`` with ``edot`` of shape (n, 2)
    and ``vel`` of shape (n, 2, 3); absent branches are NaN.
    """
    E = np.ascontiguousarray(E, dtype=float)
    B = np.ascontiguousarray(B, dtype=float)
    n = E.shape[0]
    cls = np.empty(n, dtype=np.int8)
    capture = np.empty(n, dtype=np.int8)
    nvel = np.empty(n, dtype=np.int8)
    edot = np.empty((n, 2))
    vel = np.empty((n, 2, 3))
    q = float(q)
    deg_tol = float(deg_tol)
    for i in range(n):
        r = solve_eigen(
            float(E[i, 0]), float(E[i, 1]), float(E[i, 2]),
            float(B[i, 0]), float(B[i, 1]), float(B[i, 2]), q, deg_tol,
        )
        cls[i], capture[i], nvel[i] = r[0], r[1], r[2]
        edot[i, 0], edot[i, 1] = r[3], r[7]
        vel[i, 0] = r[4:7]
        vel[i, 1] = r[8:11]
    return cls, capture, nvel, edot, vel


# ------------------------------------------------------------ cutoff quadrature

def cutoff_integrand(which, theta):
    h = math.sin(0.5 * theta)
    u = 2.0 * h * h
    f = math.sin(theta) / (u * u * u)
    if which == 1:
        f = f * math.cos(theta)
    return f


def simpson_cutoff(which, a, b, tol, max_depth=60):
    """Adaptive Simpson for sin(t) cos(t)^which / (1 - cos t)^3 on [a, b].

    A panel is accepted when its Richardson error is below ``15 tol`` times
    the panel integral of |f|. Returns ``(value, abs_value, nevals, ok)``.
    """
    fa = cutoff_integrand(which, a)
    fb = cutoff_integrand(which, b)
    m = 0.5 * (a + b)
    fm = cutoff_integrand(which, m)
    w = (b - a) / 6.0
    whole = w * (fa + 4.0 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, 0)]
    total = 0.0
    total_abs = 0.0
    nevals = 3
    ok = 1
    while stack:
        a, b, fa, fm, fb, whole, depth = stack.pop()
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = cutoff_integrand(which, lm)
        frm = cutoff_integrand(which, rm)
        nevals += 2
        wl = (m - a) / 6.0
        wr = (b - m) / 6.0
        left = wl * (fa + 4.0 * flm + fm)
        right = wr * (fm + 4.0 * frm + fb)
        aleft = wl * (abs(fa) + 4.0 * abs(flm) + abs(fm))
        aright = wr * (abs(fm) + 4.0 * abs(frm) + abs(fb))
        err = left + right - whole
        if abs(err) <= 15.0 * tol * (aleft + aright):
            total += left + right + err / 15.0
            total_abs += aleft + aright
        elif depth >= max_depth:
            ok = 0
            total += left + right + err / 15.0
            total_abs += aleft + aright
        else:
            stack.append((m, b, fm, frm, fb, right, depth + 1))
            stack.append((a, m, fa, flm, fm, left, depth + 1))
    return total, total_abs, nevals, ok


# ---------------------------------------------------------- retarded-time solve

def solve_retarded(g_vec, g, dg, x0, t_min, t_max, nscan, tol):
    """Latest root of the non-increasing light-cone function g on [t_min, min(x0, t_max)].

    ``g_vec`` evaluates g on an array (used only for the bracketing scan),
    ``g`` and ``dg`` are scalar. Returns ``(status, s)``.
    """
    top = min(x0, t_max)
    if not top > t_min:
        return NO_INTERSECTION, NAN
    h = (t_max - t_min) / nscan
    k = int(math.floor((top - t_min) / h))
    grid = t_min + h * np.arange(k + 1, dtype=float)
    grid = grid[grid < top]
    grid = np.append(grid, top)
    gv = np.asarray(g_vec(grid), dtype=float)
    gtol = tol * (1.0 + abs(x0))
    pos = gv > 0.0
    if not pos.any():
        if np.all(np.abs(gv) <= gtol):
            return SINGULAR_RAY, NAN
        return NO_INTERSECTION, NAN
    idx = np.nonzero(pos[:-1] & ~pos[1:])[0]
    if idx.size == 0:
        return NO_INTERSECTION, NAN
    s = _bisect(g, dg, float(grid[idx[-1]]), float(grid[idx[-1] + 1]), tol)
    if idx.size > 1:
        s_prev = _bisect(g, dg, float(grid[idx[-2]]), float(grid[idx[-2] + 1]), tol)
        if s - s_prev <= h:
            return AMBIGUOUS, s
    return OK, s


def _bisect(g, dg, lo, hi, tol):
    for _ in range(400):
        if hi - lo <= tol * (1.0 + abs(lo)):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    gs = g(s)
    d = dg(s)
    if d < 0.0:
        sn = s - gs / d
        if lo <= sn <= hi:
            s = sn
    return s


# ---------------------------------------------------------- Hermite worldlines

def hermite_eval(tn, zn, dzn, t, out_z, out_dz, out_ddz):
    """Cubic Hermite position and first two derivatives at scalar t (in place)."""
    n = tn.shape[0]
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tn[mid] <= t:
            lo = mid
        else:
            hi = mid
    k = lo
    dt = tn[k + 1] - tn[k]
    tau = (t - tn[k]) / dt
    t2 = tau * tau
    t3 = t2 * tau
    h00 = 2.0 * t3 - 3.0 * t2 + 1.0
    h10 = t3 - 2.0 * t2 + tau
    h01 = -2.0 * t3 + 3.0 * t2
    h11 = t3 - t2
    d00 = (6.0 * t2 - 6.0 * tau) / dt
    d10 = 3.0 * t2 - 4.0 * tau + 1.0
    d01 = (6.0 * tau - 6.0 * t2) / dt
    d11 = 3.0 * t2 - 2.0 * tau
    e00 = (12.0 * tau - 6.0) / (dt * dt)
    e10 = (6.0 * tau - 4.0) / dt
    e01 = (6.0 - 12.0 * tau) / (dt * dt)
    e11 = (6.0 * tau - 2.0) / dt
    for j in range(3):
        a = zn[k, j]
        b = zn[k + 1, j]
        da = dzn[k, j]
        db = dzn[k + 1, j]
        out_z[j] = h00 * a + h10 * dt * da + h01 * b + h11 * dt * db
        out_dz[j] = d00 * a + d10 * da + d01 * b + d11 * db
        out_ddz[j] = e00 * a + e10 * da + e01 * b + e11 * db


def hermite_retarded_time(tn, zn, dzn, x, tol, nscan, rmin_rel):
    """Retarded time on a Hermite-interpolated worldline.

    Returns ``(status, s, r)``; ``r`` is the retarded distance computed with
    the unit-normalised interpolated velocity.
    """
    tn = np.asarray(tn, dtype=float)
    zn = np.asarray(zn, dtype=float)
    dzn = np.asarray(dzn, dtype=float)
    x0, x1, x2, x3 = (float(c) for c in x)
    z = [0.0, 0.0, 0.0]
    dz = [0.0, 0.0, 0.0]
    ddz = [0.0, 0.0, 0.0]

    def g(s):
        hermite_eval(tn, zn, dzn, s, z, dz, ddz)
        r0 = x1 - z[0]
        r1 = x2 - z[1]
        r2 = x3 - z[2]
        return (x0 - s) - math.sqrt(r0 * r0 + r1 * r1 + r2 * r2)

    def g_vec(ss):
        # same operation order as hermite_eval, vectorised over the scan grid
        ss = np.asarray(ss, dtype=float)
        k = np.clip(np.searchsorted(tn, ss, side="right") - 1, 0, tn.shape[0] - 2)
        dt = tn[k + 1] - tn[k]
        tau = (ss - tn[k]) / dt
        t2 = tau * tau
        t3 = t2 * tau
        h00 = 2.0 * t3 - 3.0 * t2 + 1.0
        h10 = t3 - 2.0 * t2 + tau
        h01 = -2.0 * t3 + 3.0 * t2
        h11 = t3 - t2
        acc = np.zeros_like(ss)
        for j, xj in enumerate((x1, x2, x3)):
            zj = (h00 * zn[k, j] + h10 * dt * dzn[k, j] + h01 * zn[k + 1, j]
                  + h11 * dt * dzn[k + 1, j])
            rj = xj - zj
            acc = acc + rj * rj
        return (x0 - ss) - np.sqrt(acc)

    def dg(s):
        hermite_eval(tn, zn, dzn, s, z, dz, ddz)
        r0 = x1 - z[0]
        r1 = x2 - z[1]
        r2 = x3 - z[2]
        nr = math.sqrt(r0 * r0 + r1 * r1 + r2 * r2)
        nv = math.sqrt(dz[0] * dz[0] + dz[1] * dz[1] + dz[2] * dz[2])
        if nr == 0.0 or nv == 0.0:
            return 0.0
        return -1.0 + (r0 * dz[0] + r1 * dz[1] + r2 * dz[2]) / (nr * nv)

    status, s = solve_retarded(g_vec, g, dg, x0, float(tn[0]), float(tn[-1]), nscan, tol)
    if status == SINGULAR_RAY:
        return status, s, 0.0
    if status != OK:
        return status, s, NAN
    hermite_eval(tn, zn, dzn, s, z, dz, ddz)
    nv = math.sqrt(dz[0] * dz[0] + dz[1] * dz[1] + dz[2] * dz[2])
    R0 = x0 - s
    r = R0 - ((x1 - z[0]) * dz[0] + (x2 - z[1]) * dz[1] + (x3 - z[2]) * dz[2]) / nv
    if r <= rmin_rel * R0:
        return SINGULAR_RAY, s, r
    return OK, s, r
