# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled radial integration engine.

C transcription of ``_pure.py`` (Dormand-Prince 5(4) with event detection,
warm-started transform inverse, augmented quadrature states). Semantics and
constants must match the pure engine; parity is pinned by tests. The main
loop runs without the GIL so independent shots can use threads.
"""

from libc.math cimport sqrt, fabs, pow, log, copysign, isfinite
from libc.stdlib cimport malloc, realloc, free

import numpy as np

ENGINE_NAME = "compiled"

CONVERGED = 0
OVERSHOOT = 1
UNDERSHOOT = 2
RMAX = 3
UNDERFLOW = 4
NONFINITE = 5

DEF PHI_IDENTITY = 0
DEF F_SUM_POWERS = 0

DEF ST_CONVERGED = 0
DEF ST_OVERSHOOT = 1
DEF ST_UNDERSHOOT = 2
DEF ST_RMAX = 3
DEF ST_UNDERFLOW = 4
DEF ST_NONFINITE = 5

# Dormand-Prince 5(4) tableau
DEF A21 = 0.2
DEF A31 = 3.0 / 40.0
DEF A32 = 9.0 / 40.0
DEF A41 = 44.0 / 45.0
DEF A42 = -56.0 / 15.0
DEF A43 = 32.0 / 9.0
DEF A51 = 19372.0 / 6561.0
DEF A52 = -25360.0 / 2187.0
DEF A53 = 64448.0 / 6561.0
DEF A54 = -212.0 / 729.0
DEF A61 = 9017.0 / 3168.0
DEF A62 = -355.0 / 33.0
DEF A63 = 46732.0 / 5247.0
DEF A64 = 49.0 / 176.0
DEF A65 = -5103.0 / 18656.0
DEF B1 = 35.0 / 384.0
DEF B3 = 500.0 / 1113.0
DEF B4 = 125.0 / 192.0
DEF B5 = -2187.0 / 6784.0
DEF B6 = 11.0 / 84.0
DEF E1 = 71.0 / 57600.0
DEF E3 = -71.0 / 16695.0
DEF E4 = 71.0 / 1920.0
DEF E5 = -17253.0 / 339200.0
DEF E6 = 22.0 / 525.0
DEF E7 = -1.0 / 40.0
DEF C2 = 0.2
DEF C3 = 0.3
DEF C4 = 0.8
DEF C5 = 8.0 / 9.0

# Carlson R_D duplication constants
DEF RD_ERRTOL = 1e-3
DEF RD_C1 = 3.0 / 14.0
DEF RD_C2 = 1.0 / 6.0
DEF RD_C3 = 9.0 / 22.0
DEF RD_C4 = 3.0 / 26.0
DEF RD_C5 = 0.25 * RD_C3
DEF RD_C6 = 1.5 * RD_C4

DEF F_MAX_TERMS = 400
DEF F_SPLIT = 0.5


cdef struct MP:
    int phi_family
    double b
    double a_star
    int f_family
    double alpha
    double beta
    double mu1
    double mu2


cdef double carlson_rd_c(double x, double y, double z) noexcept nogil:
    cdef double total = 0.0, fac = 1.0
    cdef double sqx, sqy, sqz, alamb, ave, delx, dely, delz
    cdef double ea, eb, ec, ed, ee, poly
    while True:
        sqx = sqrt(x); sqy = sqrt(y); sqz = sqrt(z)
        alamb = sqx * (sqy + sqz) + sqy * sqz
        total += fac / (sqz * (z + alamb))
        fac *= 0.25
        x = 0.25 * (x + alamb)
        y = 0.25 * (y + alamb)
        z = 0.25 * (z + alamb)
        ave = 0.2 * (x + y + 3.0 * z)
        delx = (ave - x) / ave
        dely = (ave - y) / ave
        delz = (ave - z) / ave
        if max(fabs(delx), max(fabs(dely), fabs(delz))) < RD_ERRTOL:
            break
    ea = delx * dely
    eb = delz * delz
    ec = ea - eb
    ed = ea - 6.0 * eb
    ee = ed + ec + ec
    poly = (1.0 + ed * (-RD_C1 + RD_C5 * ed - RD_C6 * delz * ee)
            + delz * (RD_C2 * ee + delz * (-RD_C3 * ec + delz * RD_C4 * ea)))
    return 3.0 * total + fac * poly / (ave * sqrt(ave))


cdef inline double phi_abs(MP* mp, double t) noexcept nogil:
    cdef double t2
    if mp.phi_family == PHI_IDENTITY:
        return 1.0
    t2 = t * t
    return sqrt(1.0 + mp.b * t2 / (1.0 + t2))


cdef double capital_phi_abs(MP* mp, double x) noexcept nogil:
    cdef double x2, s2, w
    if mp.phi_family == PHI_IDENTITY:
        return x
    x2 = x * x
    s2 = x2 / (1.0 + x2)
    w = 1.0 + mp.b * s2
    return x * sqrt(w) - (mp.b / 3.0) * s2 * sqrt(s2) * carlson_rd_c(1.0 / (1.0 + x2), w, 1.0)


cdef double phi_inv_abs(MP* mp, double s, double t_warm) noexcept nogil:
    cdef double lo, hi, t, ft, tn
    cdef int i
    if mp.phi_family == PHI_IDENTITY or s == 0.0:
        return s
    lo = s / mp.a_star
    hi = s
    t = t_warm if (t_warm >= lo and t_warm <= hi) else s
    for i in range(100):
        ft = capital_phi_abs(mp, t) - s
        if ft > 0.0:
            hi = min(hi, t)
        elif ft < 0.0:
            lo = max(lo, t)
        else:
            return t
        tn = t - ft / phi_abs(mp, t)
        if tn <= lo or tn >= hi:
            tn = 0.5 * (lo + hi)
        if fabs(tn - t) <= 5e-16 * max(1.0, fabs(tn)):
            return tn
        t = tn
    return t


cdef double f_abs(MP* mp, double t) noexcept nogil:
    if t == 0.0:
        return 0.0
    if mp.f_family == F_SUM_POWERS:
        return mp.mu1 * pow(t, mp.alpha - 1.0) + mp.mu2 * pow(t, mp.beta - 1.0)
    return mp.mu1 * pow(t, mp.alpha - 1.0) * pow(1.0 + t, mp.beta - mp.alpha)


cdef double power_ratio_primitive_c(double t, double alpha, double beta) noexcept nogil:
    cdef double g = beta - alpha
    cdef double coef, total, xk, term, x
    cdef double w0, ws, d, w0k, wsk, head
    cdef int k
    if t <= 0.0:
        return 0.0
    x = t if t <= F_SPLIT else F_SPLIT
    coef = 1.0
    total = 0.0
    xk = pow(x, alpha)
    for k in range(F_MAX_TERMS):
        term = coef * xk / (alpha + k)
        total += term
        if fabs(term) <= 1e-17 * fabs(total):
            break
        coef *= (g - k) / (k + 1.0)
        xk *= x
    if t <= F_SPLIT:
        return total
    head = total
    w0 = 1.0 / (1.0 + F_SPLIT)
    ws = 1.0 / (1.0 + t)
    d = 1.0
    total = 0.0
    w0k = pow(w0, -beta)
    wsk = pow(ws, -beta)
    for k in range(F_MAX_TERMS):
        if fabs(k - beta) < 1e-9:
            term = d * log(w0 / ws)
        else:
            term = d * (w0k - wsk) / (k - beta)
        total += term
        if k > beta and fabs(term) <= 1e-17 * fabs(total):
            break
        d *= (k + 1.0 - alpha) / (k + 1.0)
        w0k *= w0
        wsk *= ws
    return head + total


cdef double big_f_abs(MP* mp, double t) noexcept nogil:
    if t == 0.0:
        return 0.0
    if mp.f_family == F_SUM_POWERS:
        return mp.mu1 * pow(t, mp.alpha) / mp.alpha + mp.mu2 * pow(t, mp.beta) / mp.beta
    if fabs(mp.beta - mp.alpha) < 1e-14:
        return mp.mu1 * pow(t, mp.alpha) / mp.alpha
    return mp.mu1 * power_ratio_primitive_c(t, mp.alpha, mp.beta)


cdef void rhs_c(MP* mp, int dim, double lam, bint with_quad,
                double r, double* y, double* t_warm, double* out) noexcept nogil:
    cdef double v = y[0], u = y[1]
    cdef double t, ta, ph, fv, rn
    t = phi_inv_abs(mp, fabs(v), t_warm[0])
    t_warm[0] = t
    if v < 0.0:
        t = -t
    ta = fabs(t)
    ph = phi_abs(mp, ta)
    fv = copysign(f_abs(mp, ta), t) if t != 0.0 else 0.0
    out[0] = u
    out[1] = (lam * t - fv) / ph - (dim - 1.0) * u / r
    if with_quad:
        rn = pow(r, dim - 1)
        out[2] = rn * t * t
        out[3] = rn * v * v
        out[4] = rn * u * u
        out[5] = rn * big_f_abs(mp, ta)


cdef void hermite_zero_c(double h, double va, double ua, double vb, double ub,
                         double* theta, double* slope) noexcept nogil:
    cdef double lo = 0.0, hi = 1.0, mid, t2, t3, h00, h10, h01, h11, val
    cdef double d00, d10, d01, d11, th
    cdef int i
    for i in range(60):
        mid = 0.5 * (lo + hi)
        t2 = mid * mid
        t3 = t2 * mid
        h00 = 2.0 * t3 - 3.0 * t2 + 1.0
        h10 = t3 - 2.0 * t2 + mid
        h01 = -2.0 * t3 + 3.0 * t2
        h11 = t3 - t2
        val = h00 * va + h10 * h * ua + h01 * vb + h11 * h * ub
        if val > 0.0:
            lo = mid
        else:
            hi = mid
    th = 0.5 * (lo + hi)
    t2 = th * th
    d00 = 6.0 * t2 - 6.0 * th
    d10 = 3.0 * t2 - 4.0 * th + 1.0
    d01 = -6.0 * t2 + 6.0 * th
    d11 = 3.0 * t2 - 2.0 * th
    theta[0] = th
    slope[0] = (d00 * va + d01 * vb) / h + d10 * ua + d11 * ub


cdef struct Result:
    int status
    double r
    double y[6]
    long n_rows


cdef int run_loop(MP* mp, int dim, double lam, double v0, double r_max,
                  double rtol, double atol, double v_floor, double v_alive,
                  double u_turn, bint with_quad, bint store, long max_steps,
                  double** rows_out, long* cap_out, Result* res) noexcept nogil:
    """Returns 0 on success, -1 on allocation failure. Rows are (r, v, u, m, n, e, p)."""
    cdef int ncomp = 6 if with_quad else 2
    cdef double sqlam = sqrt(lam)
    cdef double r_scale = 1.0 / sqlam
    cdef double r0 = 1e-6 * r_scale
    cdef double r, h, err, fac, ev, eu, sc_v, sc_u, t0, w0, th, dv
    cdef double r_prev, v_prev, u_prev
    cdef double y[6]
    cdef double y_old[6]
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double k5[6]
    cdef double k6[6]
    cdef double k7[6]
    cdef double ytmp[6]
    cdef double ynew[6]
    cdef double t_warm = 0.0
    cdef bint rejected = False
    cdef int i, status
    cdef long step, nrows = 0, cap
    cdef double* rows
    cdef double rn0

    for i in range(6):
        y[i] = 0.0

    t0 = phi_inv_abs(mp, v0, v0)
    t_warm = t0
    w0 = (lam * t0 - f_abs(mp, t0)) / phi_abs(mp, t0)
    y[0] = v0 + w0 * r0 * r0 / (2.0 * dim)
    y[1] = w0 * r0 / dim
    if with_quad:
        rn0 = pow(r0, dim)
        y[2] = t0 * t0 * rn0 / dim
        y[3] = v0 * v0 * rn0 / dim
        y[4] = (w0 / dim) * (w0 / dim) * pow(r0, dim + 2) / (dim + 2.0)
        y[5] = big_f_abs(mp, t0) * rn0 / dim
    r = r0

    cap = cap_out[0]
    rows = rows_out[0]
    if store:
        if rows == NULL:
            return -1
        rows[0] = r
        for i in range(6):
            rows[1 + i] = y[i]
        nrows = 1

    h = 1e-3 * r_scale
    rhs_c(mp, dim, lam, with_quad, r, y, &t_warm, k1)
    status = ST_RMAX

    for step in range(max_steps):
        if r >= r_max:
            status = ST_RMAX
            break
        if h > r_max - r:
            h = r_max - r

        for i in range(ncomp):
            ytmp[i] = y[i] + h * A21 * k1[i]
        rhs_c(mp, dim, lam, with_quad, r + C2 * h, ytmp, &t_warm, k2)
        for i in range(ncomp):
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
        rhs_c(mp, dim, lam, with_quad, r + C3 * h, ytmp, &t_warm, k3)
        for i in range(ncomp):
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        rhs_c(mp, dim, lam, with_quad, r + C4 * h, ytmp, &t_warm, k4)
        for i in range(ncomp):
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        rhs_c(mp, dim, lam, with_quad, r + C5 * h, ytmp, &t_warm, k5)
        for i in range(ncomp):
            ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                  + A64 * k4[i] + A65 * k5[i])
        rhs_c(mp, dim, lam, with_quad, r + h, ytmp, &t_warm, k6)
        for i in range(ncomp):
            ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                                  + B5 * k5[i] + B6 * k6[i])
        rhs_c(mp, dim, lam, with_quad, r + h, ynew, &t_warm, k7)

        if not (isfinite(ynew[0]) and isfinite(ynew[1])):
            status = ST_NONFINITE
            break

        ev = h * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0] + E7 * k7[0])
        eu = h * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1] + E6 * k6[1] + E7 * k7[1])
        sc_v = atol * v0 + rtol * max(fabs(y[0]), fabs(ynew[0]))
        sc_u = atol * v0 * sqlam + rtol * max(fabs(y[1]), fabs(ynew[1]))
        err = sqrt(0.5 * ((ev / sc_v) * (ev / sc_v) + (eu / sc_u) * (eu / sc_u)))

        if err <= 1.0:
            r_prev = r
            v_prev = y[0]
            u_prev = y[1]
            r += h
            for i in range(ncomp):
                y_old[i] = y[i]
                y[i] = ynew[i]
                k1[i] = k7[i]  # FSAL
            if err == 0.0:
                fac = 5.0
            else:
                fac = min(5.0, max(0.2, 0.9 * pow(err, -0.2)))
            if rejected:
                fac = min(fac, 1.0)
            h *= fac
            rejected = False

            if y[0] <= 0.0:
                hermite_zero_c(r - r_prev, v_prev, u_prev, y[0], y[1], &th, &dv)
                r = r_prev + th * (r - r_prev)
                y[0] = 0.0
                y[1] = dv
                if with_quad:
                    for i in range(2, ncomp):
                        y[i] = y_old[i] + th * (y[i] - y_old[i])
                status = ST_OVERSHOOT
                if store:
                    if nrows >= cap:
                        cap *= 2
                        rows = <double*>realloc(rows, cap * 7 * sizeof(double))
                        if rows == NULL:
                            return -1
                        rows_out[0] = rows
                        cap_out[0] = cap
                    rows[nrows * 7] = r
                    for i in range(6):
                        rows[nrows * 7 + 1 + i] = y[i]
                    nrows += 1
                break

            if store:
                if nrows >= cap:
                    cap *= 2
                    rows = <double*>realloc(rows, cap * 7 * sizeof(double))
                    if rows == NULL:
                        return -1
                    rows_out[0] = rows
                    cap_out[0] = cap
                rows[nrows * 7] = r
                for i in range(6):
                    rows[nrows * 7 + 1 + i] = y[i]
                nrows += 1

            if y[1] >= u_turn and y[0] >= v_alive:
                status = ST_UNDERSHOOT
                break
            if y[0] <= v_floor:
                status = ST_CONVERGED if y[1] < 0.0 else ST_UNDERSHOOT
                break
        else:
            rejected = True
            h *= max(0.2, 0.9 * pow(err, -0.2))

        if h <= 20.0 * 2.3e-16 * max(r, r0):
            status = ST_UNDERFLOW
            break

    res.status = status
    res.r = r
    for i in range(6):
        res.y[i] = y[i]
    res.n_rows = nrows
    return 0


def integrate_radial_raw(model_params, int dim, double lam, double v0,
                         double r_max, double rtol, double atol,
                         double v_floor_rel, double u_turn_rel, double v_alive_rel,
                         bint with_quad=False, bint store=False, long max_steps=500000):
    """Compiled twin of ``_pure.integrate_radial_raw`` (same contract)."""
    cdef MP mp
    mp.phi_family = int(model_params[0])
    mp.b = float(model_params[1])
    mp.f_family = int(model_params[2])
    mp.alpha = float(model_params[3])
    mp.beta = float(model_params[4])
    mp.mu1 = float(model_params[5])
    mp.mu2 = float(model_params[6])
    mp.a_star = 1.0 if mp.phi_family == PHI_IDENTITY else sqrt(1.0 + mp.b)

    cdef double v_floor = v_floor_rel * v0
    cdef double v_alive = v_alive_rel * v0
    cdef double u_turn = u_turn_rel * v0 * sqrt(lam)

    cdef Result res
    cdef double* rows = NULL
    cdef long cap = 0
    cdef int rc
    if store:
        cap = 4096
        rows = <double*>malloc(cap * 7 * sizeof(double))
        if rows == NULL:
            raise MemoryError()
    with nogil:
        rc = run_loop(&mp, dim, lam, v0, r_max, rtol, atol, v_floor, v_alive,
                      u_turn, with_quad, store, max_steps, &rows, &cap, &res)
    if rc != 0:
        if rows != NULL:
            free(rows)
        raise MemoryError()

    quad = (res.y[2], res.y[3], res.y[4], res.y[5]) if with_quad else (0.0, 0.0, 0.0, 0.0)
    grid = None
    cdef long n = res.n_rows
    cdef double[:, ::1] view
    if store:
        arr = np.empty((n, 7), dtype=np.float64)
        view = arr
        for i in range(n):
            for j in range(7):
                view[i, j] = rows[i * 7 + j]
        free(rows)
        grid = {"r": np.ascontiguousarray(arr[:, 0]),
                "v": np.ascontiguousarray(arr[:, 1]),
                "dv": np.ascontiguousarray(arr[:, 2])}
        if with_quad:
            grid.update({"m": np.ascontiguousarray(arr[:, 3]),
                         "n": np.ascontiguousarray(arr[:, 4]),
                         "e": np.ascontiguousarray(arr[:, 5]),
                         "p": np.ascontiguousarray(arr[:, 6])})
    return res.status, res.r, res.y[0], res.y[1], quad, grid


def rd(double x, double y, double z):
    """Carlson R_D (exposed for parity tests)."""
    return carlson_rd_c(x, y, z)


def transform_eval(model_params, double s):
    """(Phi_inv(s), phi(Phi_inv(s)), F(Phi_inv(s))) for s >= 0 (parity tests)."""
    cdef MP mp
    mp.phi_family = int(model_params[0])
    mp.b = float(model_params[1])
    mp.f_family = int(model_params[2])
    mp.alpha = float(model_params[3])
    mp.beta = float(model_params[4])
    mp.mu1 = float(model_params[5])
    mp.mu2 = float(model_params[6])
    mp.a_star = 1.0 if mp.phi_family == PHI_IDENTITY else sqrt(1.0 + mp.b)
    cdef double t = phi_inv_abs(&mp, s, s)
    return t, phi_abs(&mp, t), big_f_abs(&mp, t)
