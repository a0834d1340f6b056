# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``.

Every routine follows the Python reference statement by statement; the
extension is built with ``-ffp-contract=off`` so no fused multiply-adds
change the rounding.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, sin, cos, fabs, floor, NAN

cnp.import_array()

cdef enum:
    ZERO = 0
    NULLF = 1
    PURE_E = 2
    PURE_B = 3
    SUB_MAGNETIC = 4
    SUPER_ELECTRIC = 5
    GENERIC = 6

cdef enum:
    OK = 0
    NO_INTERSECTION = 1
    SINGULAR_RAY = 2
    AMBIGUOUS = 3


cdef struct EigenOut:
    int cls
    int capture
    int nvel
    double ep
    double vp[3]
    double em
    double vm[3]


cdef void _solve_eigen(double Ex, double Ey, double Ez, double Bx, double By, double Bz,
                       double q, double deg_tol, EigenOut* o) noexcept nogil:
    cdef double EE = Ex * Ex + Ey * Ey + Ez * Ez
    cdef double BB = Bx * Bx + By * By + Bz * Bz
    cdef double EB = Ex * Bx + Ey * By + Ez * Bz
    cdef double S = EE + BB
    cdef double cx = Ey * Bz - Ez * By
    cdef double cy = Ez * Bx - Ex * Bz
    cdef double cz = Ex * By - Ey * Bx
    cdef double d, w, mu, aEB, lam, nu, sigma, kn, px, py, pz
    cdef int j
    o.ep = NAN
    o.em = NAN
    for j in range(3):
        o.vp[j] = NAN
        o.vm[j] = NAN
    o.capture = 0
    o.nvel = 2

    if S < deg_tol * deg_tol:
        o.cls = ZERO
        o.nvel = 0
        return

    if fabs(EB) < deg_tol * S:
        d = BB - EE
        if d > deg_tol * S:
            o.capture = 1
        if fabs(d) < deg_tol * S:
            o.cls = NULLF
            o.nvel = 1
            o.ep = 0.0
            o.vp[0] = cx / BB
            o.vp[1] = cy / BB
            o.vp[2] = cz / BB
        elif EE < deg_tol * deg_tol * S:
            o.cls = PURE_B
            w = sqrt(BB)
            o.ep = 0.0
            o.em = 0.0
            o.vp[0] = Bx / w
            o.vp[1] = By / w
            o.vp[2] = Bz / w
            o.vm[0] = -o.vp[0]
            o.vm[1] = -o.vp[1]
            o.vm[2] = -o.vp[2]
        elif BB < deg_tol * deg_tol * S:
            o.cls = PURE_E
            w = sqrt(EE)
            o.ep = q * w
            o.em = -(q * w)
            o.vp[0] = Ex / w
            o.vp[1] = Ey / w
            o.vp[2] = Ez / w
            o.vm[0] = -o.vp[0]
            o.vm[1] = -o.vp[1]
            o.vm[2] = -o.vp[2]
        elif d > 0.0:
            o.cls = SUB_MAGNETIC
            w = sqrt(d)
            o.ep = 0.0
            o.em = 0.0
            o.vp[0] = (cx + Bx * w) / BB
            o.vp[1] = (cy + By * w) / BB
            o.vp[2] = (cz + Bz * w) / BB
            o.vm[0] = (cx - Bx * w) / BB
            o.vm[1] = (cy - By * w) / BB
            o.vm[2] = (cz - Bz * w) / BB
        else:
            o.cls = SUPER_ELECTRIC
            w = sqrt(-d)
            o.ep = q * w
            o.em = -(q * w)
            o.vp[0] = (cx + Ex * w) / EE
            o.vp[1] = (cy + Ey * w) / EE
            o.vp[2] = (cz + Ez * w) / EE
            o.vm[0] = (cx - Ex * w) / EE
            o.vm[1] = (cy - Ey * w) / EE
            o.vm[2] = (cz - Ez * w) / EE
        return

    d = BB - EE
    mu = sqrt(d * d + 4.0 * (EB * EB))
    aEB = fabs(EB)
    if d <= 0.0:
        lam = sqrt((mu - d) / 2.0)
        nu = aEB / lam
    else:
        nu = sqrt((d + mu) / 2.0)
        lam = aEB / nu
    sigma = (S + mu) / 2.0
    kn = nu if EB > 0.0 else -nu
    px = lam * Ex + kn * Bx
    py = lam * Ey + kn * By
    pz = lam * Ez + kn * Bz
    o.cls = GENERIC
    o.ep = q * lam
    o.em = -(q * lam)
    o.vp[0] = (cx + px) / sigma
    o.vp[1] = (cy + py) / sigma
    o.vp[2] = (cz + pz) / sigma
    o.vm[0] = (cx - px) / sigma
    o.vm[1] = (cy - py) / sigma
    o.vm[2] = (cz - pz) / sigma


def solve_eigen(double Ex, double Ey, double Ez, double Bx, double By, double Bz,
                double q, double deg_tol):
    cdef EigenOut o
    _solve_eigen(Ex, Ey, Ez, Bx, By, Bz, q, deg_tol, &o)
    return (o.cls, o.capture, o.nvel, o.ep, o.vp[0], o.vp[1], o.vp[2],
            o.em, o.vm[0], o.vm[1], o.vm[2])


def eigen_batch(E, B, double q, double deg_tol):
    cdef double[:, ::1] Ev = np.ascontiguousarray(E, dtype=np.float64)
    cdef double[:, ::1] Bv = np.ascontiguousarray(B, dtype=np.float64)
    cdef Py_ssize_t n = Ev.shape[0]
    cdef Py_ssize_t i
    cdef int j
    cls_a = np.empty(n, dtype=np.int8)
    cap_a = np.empty(n, dtype=np.int8)
    nvel_a = np.empty(n, dtype=np.int8)
    edot_a = np.empty((n, 2), dtype=np.float64)
    vel_a = np.empty((n, 2, 3), dtype=np.float64)
    cdef signed char[::1] cls = cls_a
    cdef signed char[::1] cap = cap_a
    cdef signed char[::1] nvel = nvel_a
    cdef double[:, ::1] edot = edot_a
    cdef double[:, :, ::1] vel = vel_a
    cdef EigenOut o
    with nogil:
        for i in range(n):
            _solve_eigen(Ev[i, 0], Ev[i, 1], Ev[i, 2], Bv[i, 0], Bv[i, 1], Bv[i, 2],
                         q, deg_tol, &o)
            cls[i] = o.cls
            cap[i] = o.capture
            nvel[i] = o.nvel
            edot[i, 0] = o.ep
            edot[i, 1] = o.em
            for j in range(3):
                vel[i, 0, j] = o.vp[j]
                vel[i, 1, j] = o.vm[j]
    return cls_a, cap_a, nvel_a, edot_a, vel_a


cdef inline double _cutoff_integrand(int which, double theta) noexcept nogil:
    cdef double h = sin(0.5 * theta)
    cdef double u = 2.0 * h * h
    cdef double f = sin(theta) / (u * u * u)
    if which == 1:
        f = f * cos(theta)
    return f


cdef struct Panel:
    double a, b, fa, fm, fb, whole
    int depth


def simpson_cutoff(int which, double a, double b, double tol, int max_depth=60):
    cdef Panel stack[256]
    cdef int top = 0
    cdef Panel p
    cdef double fa = _cutoff_integrand(which, a)
    cdef double fb = _cutoff_integrand(which, b)
    cdef double m = 0.5 * (a + b)
    cdef double fm = _cutoff_integrand(which, m)
    cdef double w = (b - a) / 6.0
    cdef double lm, rm, flm, frm, wl, wr, left, right, aleft, aright, err
    cdef double total = 0.0
    cdef double total_abs = 0.0
    cdef long nevals = 3
    cdef int ok = 1
    if max_depth > 250:
        max_depth = 250
    stack[0].a = a
    stack[0].b = b
    stack[0].fa = fa
    stack[0].fm = fm
    stack[0].fb = fb
    stack[0].whole = w * (fa + 4.0 * fm + fb)
    stack[0].depth = 0
    top = 1
    with nogil:
        while top > 0:
            top -= 1
            p = stack[top]
            m = 0.5 * (p.a + p.b)
            lm = 0.5 * (p.a + m)
            rm = 0.5 * (m + p.b)
            flm = _cutoff_integrand(which, lm)
            frm = _cutoff_integrand(which, rm)
            nevals += 2
            wl = (m - p.a) / 6.0
            wr = (p.b - m) / 6.0
            left = wl * (p.fa + 4.0 * flm + p.fm)
            right = wr * (p.fm + 4.0 * frm + p.fb)
            aleft = wl * (fabs(p.fa) + 4.0 * fabs(flm) + fabs(p.fm))
            aright = wr * (fabs(p.fm) + 4.0 * fabs(frm) + fabs(p.fb))
            err = left + right - p.whole
            if fabs(err) <= 15.0 * tol * (aleft + aright):
                total += left + right + err / 15.0
                total_abs += aleft + aright
            elif p.depth >= max_depth:
                ok = 0
                total += left + right + err / 15.0
                total_abs += aleft + aright
            else:
                stack[top].a = m
                stack[top].b = p.b
                stack[top].fa = p.fm
                stack[top].fm = frm
                stack[top].fb = p.fb
                stack[top].whole = right
                stack[top].depth = p.depth + 1
                top += 1
                stack[top].a = p.a
                stack[top].b = m
                stack[top].fa = p.fa
                stack[top].fm = flm
                stack[top].fb = p.fm
                stack[top].whole = left
                stack[top].depth = p.depth + 1
                top += 1
    return total, total_abs, nevals, ok


cdef struct Hermite:
    const double* tn
    const double* zn
    const double* dzn
    Py_ssize_t n


cdef void _hermite_eval(Hermite* H, double t, double* z, double* dz, double* ddz) noexcept nogil:
    cdef Py_ssize_t lo = 0
    cdef Py_ssize_t hi = H.n - 1
    cdef Py_ssize_t mid, k
    cdef int j
    cdef double dt, tau, t2, t3, h00, h10, h01, h11, d00, d10, d01, d11
    cdef double e00, e10, e01, e11, a, b, da, db
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if H.tn[mid] <= t:
            lo = mid
        else:
            hi = mid
    k = lo
    dt = H.tn[k + 1] - H.tn[k]
    tau = (t - H.tn[k]) / dt
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
        a = H.zn[3 * k + j]
        b = H.zn[3 * (k + 1) + j]
        da = H.dzn[3 * k + j]
        db = H.dzn[3 * (k + 1) + j]
        z[j] = h00 * a + h10 * dt * da + h01 * b + h11 * dt * db
        dz[j] = d00 * a + d10 * da + d01 * b + d11 * db
        ddz[j] = e00 * a + e10 * da + e01 * b + e11 * db


cdef double _g(Hermite* H, const double* x, double s) noexcept nogil:
    cdef double z[3]
    cdef double dz[3]
    cdef double ddz[3]
    _hermite_eval(H, s, z, dz, ddz)
    cdef double r0 = x[1] - z[0]
    cdef double r1 = x[2] - z[1]
    cdef double r2 = x[3] - z[2]
    return (x[0] - s) - sqrt(r0 * r0 + r1 * r1 + r2 * r2)


cdef double _dg(Hermite* H, const double* x, double s) noexcept nogil:
    cdef double z[3]
    cdef double dz[3]
    cdef double ddz[3]
    _hermite_eval(H, s, z, dz, ddz)
    cdef double r0 = x[1] - z[0]
    cdef double r1 = x[2] - z[1]
    cdef double r2 = x[3] - z[2]
    cdef double nr = sqrt(r0 * r0 + r1 * r1 + r2 * r2)
    cdef double nv = sqrt(dz[0] * dz[0] + dz[1] * dz[1] + dz[2] * dz[2])
    if nr == 0.0 or nv == 0.0:
        return 0.0
    return -1.0 + (r0 * dz[0] + r1 * dz[1] + r2 * dz[2]) / (nr * nv)


cdef double _bisect(Hermite* H, const double* x, double lo, double hi, double tol) noexcept nogil:
    cdef int it
    cdef double mid, s, gs, d, sn
    for it in range(400):
        if hi - lo <= tol * (1.0 + fabs(lo)):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _g(H, x, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    gs = _g(H, x, s)
    d = _dg(H, x, s)
    if d < 0.0:
        sn = s - gs / d
        if lo <= sn and sn <= hi:
            s = sn
    return s


def hermite_retarded_time(tn, zn, dzn, x, double tol, int nscan, double rmin_rel):
    cdef double[::1] tv = np.ascontiguousarray(tn, dtype=np.float64)
    cdef double[:, ::1] zv = np.ascontiguousarray(zn, dtype=np.float64)
    cdef double[:, ::1] dzv = np.ascontiguousarray(dzn, dtype=np.float64)
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Hermite H
    H.tn = &tv[0]
    H.zn = &zv[0, 0]
    H.dzn = &dzv[0, 0]
    H.n = tv.shape[0]
    cdef const double* xp = &xv[0]
    cdef double t_min = tv[0]
    cdef double t_max = tv[H.n - 1]
    cdef double x0 = xp[0]
    cdef double top = x0 if x0 < t_max else t_max
    cdef double h, gtol, gi, gnext, si, snext, s, s_prev, R0, nv, r
    cdef long k, i, nb, last_i, prev_i, npts
    cdef int any_pos = 0
    cdef int all_small = 1
    cdef double z[3]
    cdef double dz[3]
    cdef double ddz[3]
    if not top > t_min:
        return NO_INTERSECTION, NAN, NAN
    h = (t_max - t_min) / nscan
    k = <long> floor((top - t_min) / h)
    # grid: t_min + h*i for i <= k while < top, then top itself
    npts = 0
    for i in range(k + 1):
        if t_min + h * i < top:
            npts = i + 1
    gtol = tol * (1.0 + fabs(x0))
    nb = 0
    last_i = -1
    prev_i = -1
    with nogil:
        gi = _g(&H, xp, t_min)
        si = t_min
        for i in range(npts):
            if i + 1 < npts:
                snext = t_min + h * (i + 1)
            else:
                snext = top
            gnext = _g(&H, xp, snext)
            if gi > 0.0:
                any_pos = 1
            if fabs(gi) > gtol:
                all_small = 0
            if gi > 0.0 and not gnext > 0.0:
                nb += 1
                prev_i = last_i
                last_i = i
            gi = gnext
            si = snext
        if gi > 0.0:
            any_pos = 1
        if fabs(gi) > gtol:
            all_small = 0
    if not any_pos:
        if all_small:
            return SINGULAR_RAY, NAN, 0.0
        return NO_INTERSECTION, NAN, NAN
    if nb == 0:
        return NO_INTERSECTION, NAN, NAN
    s = _bisect(&H, xp, t_min + h * last_i,
                (t_min + h * (last_i + 1)) if last_i + 1 < npts else top, tol)
    if nb > 1:
        s_prev = _bisect(&H, xp, t_min + h * prev_i,
                         (t_min + h * (prev_i + 1)) if prev_i + 1 < npts else top, tol)
        if s - s_prev <= h:
            return AMBIGUOUS, s, NAN
    _hermite_eval(&H, s, z, dz, ddz)
    nv = sqrt(dz[0] * dz[0] + dz[1] * dz[1] + dz[2] * dz[2])
    R0 = x0 - s
    r = R0 - ((xp[1] - z[0]) * dz[0] + (xp[2] - z[1]) * dz[1] + (xp[3] - z[2]) * dz[2]) / nv
    if r <= rmin_rel * R0:
        return SINGULAR_RAY, s, r
    return OK, s, r
