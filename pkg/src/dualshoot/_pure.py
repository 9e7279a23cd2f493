"""Pure-Python radial integration engine.

Reference implementation of the hot kernel: a Dormand-Prince 5(4) adaptive
integrator for the radial equation

    v'' + (N-1)/r * v' = lam*v - g_lam(v)
      with lam*v - g_lam(v) = (lam*t - f(t)) / phi(t),  t = Phi_inv(v),

augmented with the running radial integrals needed for norms and the energy
(surface-measure factor omitted here):

    m' = r^(N-1) * Phi_inv(v)^2      (dual mass)
    n' = r^(N-1) * v^2               (transformed mass)
    e' = r^(N-1) * v'^2              (gradient square)
    p' = r^(N-1) * F(Phi_inv(v))     (potential term of the energy)

The compiled engine in ``_kernel.pyx`` is a line-for-line C transcription of
this module; parity between the two is pinned by tests. Negative amplitudes
(transient excursions of trial shots) use the odd extension of f and Phi.

Event classification on accepted steps:
  OVERSHOOT   v crosses 0 (crossing radius refined by Hermite bisection),
  UNDERSHOOT  v' turns positive while v is still alive,
  CONVERGED   v decayed below the floor with negative slope,
  RMAX        no event before the domain cap,
  UNDERFLOW / NONFINITE integration failures.
"""
from __future__ import annotations

import math

import numpy as np

from .models import _power_ratio_primitive

ENGINE_NAME = "pure"

# trajectory status codes (shared with the compiled engine)
CONVERGED = 0
OVERSHOOT = 1
UNDERSHOOT = 2
RMAX = 3
UNDERFLOW = 4
NONFINITE = 5

PHI_IDENTITY = 0
PHI_BOUNDED_RATIONAL = 1
F_SUM_POWERS = 0
F_POWER_RATIO = 1

# Dormand-Prince 5(4) tableau
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0

# Carlson R_D duplication constants
_RD_ERRTOL = 1e-3
_RD_C1, _RD_C2, _RD_C3, _RD_C4 = 3.0 / 14.0, 1.0 / 6.0, 9.0 / 22.0, 3.0 / 26.0
_RD_C5, _RD_C6 = 0.25 * _RD_C3, 1.5 * _RD_C4


def carlson_rd(x: float, y: float, z: float) -> float:
    """Carlson symmetric elliptic integral R_D by the duplication algorithm."""
    total = 0.0
    fac = 1.0
    while True:
        sqx, sqy, sqz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
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
        if max(abs(delx), abs(dely), abs(delz)) < _RD_ERRTOL:
            break
    ea = delx * dely
    eb = delz * delz
    ec = ea - eb
    ed = ea - 6.0 * eb
    ee = ed + ec + ec
    poly = (1.0 + ed * (-_RD_C1 + _RD_C5 * ed - _RD_C6 * delz * ee)
            + delz * (_RD_C2 * ee + delz * (-_RD_C3 * ec + delz * _RD_C4 * ea)))
    return 3.0 * total + fac * poly / (ave * math.sqrt(ave))


def _phi_abs(phi_family: int, b: float, t: float) -> float:
    if phi_family == PHI_IDENTITY:
        return 1.0
    t2 = t * t
    return math.sqrt(1.0 + b * t2 / (1.0 + t2))


def _capital_phi_abs(phi_family: int, b: float, x: float) -> float:
    if phi_family == PHI_IDENTITY:
        return x
    x2 = x * x
    s2 = x2 / (1.0 + x2)
    w = 1.0 + b * s2
    return x * math.sqrt(w) - (b / 3.0) * s2 * math.sqrt(s2) * carlson_rd(1.0 / (1.0 + x2), w, 1.0)


def _phi_inv_abs(phi_family: int, b: float, a_star: float, s: float, t_warm: float) -> float:
    """Inverse of the amplitude transform on [0, inf), warm-started Newton."""
    if phi_family == PHI_IDENTITY or s == 0.0:
        return s
    lo = s / a_star
    hi = s
    t = t_warm if lo <= t_warm <= hi else s
    for _ in range(100):
        ft = _capital_phi_abs(phi_family, b, t) - s
        if ft > 0.0:
            hi = min(hi, t)
        elif ft < 0.0:
            lo = max(lo, t)
        else:
            return t
        tn = t - ft / _phi_abs(phi_family, b, t)
        if tn <= lo or tn >= hi:
            tn = 0.5 * (lo + hi)
        if abs(tn - t) <= 5e-16 * max(1.0, abs(tn)):
            return tn
        t = tn
    return t


def _f_abs(f_family: int, alpha: float, beta: float, mu1: float, mu2: float, t: float) -> float:
    if t == 0.0:
        return 0.0
    if f_family == F_SUM_POWERS:
        return mu1 * t ** (alpha - 1.0) + mu2 * t ** (beta - 1.0)
    return mu1 * t ** (alpha - 1.0) * (1.0 + t) ** (beta - alpha)


def _F_abs(f_family: int, alpha: float, beta: float, mu1: float, mu2: float, t: float) -> float:
    if t == 0.0:
        return 0.0
    if f_family == F_SUM_POWERS:
        return mu1 * t ** alpha / alpha + mu2 * t ** beta / beta
    if abs(beta - alpha) < 1e-14:
        return mu1 * t ** alpha / alpha
    return mu1 * _power_ratio_primitive(t, alpha, beta)


class _Rhs:
    """Derivative evaluation with a warm-started transform inverse."""

    __slots__ = ("phi_family", "b", "a_star", "f_family", "alpha", "beta",
                 "mu1", "mu2", "dim", "lam", "with_quad", "t_warm")

    def __init__(self, model_params, dim, lam, with_quad):
        (self.phi_family, self.b, self.f_family,
         self.alpha, self.beta, self.mu1, self.mu2) = model_params
        self.a_star = 1.0 if self.phi_family == PHI_IDENTITY else math.sqrt(1.0 + self.b)
        self.dim = dim
        self.lam = lam
        self.with_quad = with_quad
        self.t_warm = 0.0

    def inv(self, v: float) -> float:
        t = _phi_inv_abs(self.phi_family, self.b, self.a_star, abs(v), self.t_warm)
        self.t_warm = t
        return math.copysign(t, v) if v != 0.0 else 0.0

    def source(self, v: float) -> float:
        """lam*v - g_lam(v) = (lam*t - f(t))/phi(t), odd in v."""
        t = self.inv(v)
        ta = abs(t)
        ph = _phi_abs(self.phi_family, self.b, ta)
        fv = math.copysign(_f_abs(self.f_family, self.alpha, self.beta, self.mu1, self.mu2, ta), t)
        return (self.lam * t - fv) / ph

    def __call__(self, r: float, y: list) -> list:
        v, u = y[0], y[1]
        t = self.inv(v)
        ta = abs(t)
        ph = _phi_abs(self.phi_family, self.b, ta)
        fv = math.copysign(_f_abs(self.f_family, self.alpha, self.beta, self.mu1, self.mu2, ta), t)
        dv = u
        du = (self.lam * t - fv) / ph - (self.dim - 1.0) * u / r
        if not self.with_quad:
            return [dv, du]
        rn = r ** (self.dim - 1)
        return [dv, du,
                rn * t * t,
                rn * v * v,
                rn * u * u,
                rn * _F_abs(self.f_family, self.alpha, self.beta, self.mu1, self.mu2, ta)]


def _hermite_zero(h: float, va: float, ua: float, vb: float, ub: float):
    """Crossing of the cubic Hermite interpolant of v on a step, (theta, v', )."""
    lo, hi = 0.0, 1.0

    def val(th):
        t2 = th * th
        t3 = t2 * th
        h00 = 2.0 * t3 - 3.0 * t2 + 1.0
        h10 = t3 - 2.0 * t2 + th
        h01 = -2.0 * t3 + 3.0 * t2
        h11 = t3 - t2
        return h00 * va + h10 * h * ua + h01 * vb + h11 * h * ub

    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if val(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    th = 0.5 * (lo + hi)
    t2 = th * th
    d00 = 6.0 * t2 - 6.0 * th
    d10 = 3.0 * t2 - 4.0 * th + 1.0
    d01 = -6.0 * t2 + 6.0 * th
    d11 = 3.0 * t2 - 2.0 * th
    dv = (d00 * va + d01 * vb) / h + d10 * ua + d11 * ub
    return th, dv


def integrate_radial_raw(model_params, dim, lam, v0, r_max, rtol, atol,
                         v_floor_rel, u_turn_rel, v_alive_rel,
                         with_quad=False, store=False, max_steps=500_000):
    """Integrate one radial shot; returns (status, end state, integrals, grid).

    ``model_params`` is the flat tuple (phi_family, b, f_family, alpha, beta,
    mu1, mu2). The coordinate singularity at r = 0 is removed by the series
    start v(r) = v0 + (lam*v0 - g_lam(v0)) r^2/(2N) on [0, r_start],
    r_start = 1e-6/sqrt(lam). Error control acts on (v, v') with scales
    (v0, v0*sqrt(lam)); the quadrature states ride along on the same steps.

    Returns (status, r_end, v_end, u_end, (m, n, e, p), grid) with
    grid = None or a dict of numpy arrays r, v, dv, m, n, e, p.
    """
    rhs = _Rhs(model_params, dim, lam, with_quad)
    sqlam = math.sqrt(lam)
    r_scale = 1.0 / sqlam
    r0 = 1e-6 * r_scale
    v_floor = v_floor_rel * v0
    v_alive = v_alive_rel * v0
    u_turn = u_turn_rel * v0 * sqlam
    ncomp = 6 if with_quad else 2

    t0 = rhs.inv(v0)
    w0 = rhs.source(v0)
    v_s = v0 + w0 * r0 * r0 / (2.0 * dim)
    u_s = w0 * r0 / dim
    y = [v_s, u_s]
    if with_quad:
        rn0 = r0 ** dim
        y += [t0 * t0 * rn0 / dim,
              v0 * v0 * rn0 / dim,
              (w0 / dim) ** 2 * r0 ** (dim + 2) / (dim + 2.0),
              _F_abs(rhs.f_family, rhs.alpha, rhs.beta, rhs.mu1, rhs.mu2, abs(t0)) * rn0 / dim]
    r = r0

    rows = [[r] + list(y)] if store else None

    h = 1e-3 * r_scale
    k1 = rhs(r, y)
    status = RMAX
    rejected = False
    for _ in range(max_steps):
        if r >= r_max:
            status = RMAX
            break
        if h > r_max - r:
            h = r_max - r
        # stages
        y2 = [y[i] + h * _A21 * k1[i] for i in range(ncomp)]
        k2 = rhs(r + _C2 * h, y2)
        y3 = [y[i] + h * (_A31 * k1[i] + _A32 * k2[i]) for i in range(ncomp)]
        k3 = rhs(r + _C3 * h, y3)
        y4 = [y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i]) for i in range(ncomp)]
        k4 = rhs(r + _C4 * h, y4)
        y5 = [y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
              for i in range(ncomp)]
        k5 = rhs(r + _C5 * h, y5)
        y6 = [y[i] + h * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i])
              for i in range(ncomp)]
        k6 = rhs(r + h, y6)
        ynew = [y[i] + h * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i])
                for i in range(ncomp)]
        k7 = rhs(r + h, ynew)

        if not (math.isfinite(ynew[0]) and math.isfinite(ynew[1])):
            status = NONFINITE
            break

        ev = h * (_E1 * k1[0] + _E3 * k3[0] + _E4 * k4[0] + _E5 * k5[0] + _E6 * k6[0] + _E7 * k7[0])
        eu = h * (_E1 * k1[1] + _E3 * k3[1] + _E4 * k4[1] + _E5 * k5[1] + _E6 * k6[1] + _E7 * k7[1])
        sc_v = atol * v0 + rtol * max(abs(y[0]), abs(ynew[0]))
        sc_u = atol * v0 * sqlam + rtol * max(abs(y[1]), abs(ynew[1]))
        err = math.sqrt(0.5 * ((ev / sc_v) ** 2 + (eu / sc_u) ** 2))

        if err <= 1.0:
            r_prev, v_prev, u_prev = r, y[0], y[1]
            r += h
            y_old = y
            y = ynew
            k1 = k7  # FSAL
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            if rejected:
                fac = min(fac, 1.0)
            h *= fac
            rejected = False

            if y[0] <= 0.0:
                th, dv = _hermite_zero(r - r_prev, v_prev, u_prev, y[0], y[1])
                r = r_prev + th * (r - r_prev)
                y = [0.0, dv] + ([y_old[i] + th * (y[i] - y_old[i]) for i in range(2, ncomp)]
                                 if with_quad else [])
                status = OVERSHOOT
                if store:
                    rows.append([r] + list(y) )
                break
            if store:
                rows.append([r] + list(y))
            if y[1] >= u_turn and y[0] >= v_alive:
                status = UNDERSHOOT
                break
            if y[0] <= v_floor:
                status = CONVERGED if y[1] < 0.0 else UNDERSHOOT
                break
        else:
            rejected = True
            h *= max(0.2, 0.9 * err ** -0.2)

        if h <= 20.0 * 2.3e-16 * max(r, r0):
            status = UNDERFLOW
            break
    else:
        status = RMAX

    quad = tuple(y[2:6]) if with_quad else (0.0, 0.0, 0.0, 0.0)
    grid = None
    if store:
        arr = np.asarray(rows, dtype=float)
        grid = {"r": arr[:, 0], "v": arr[:, 1], "dv": arr[:, 2]}
        if with_quad:
            grid.update({"m": arr[:, 3], "n": arr[:, 4], "e": arr[:, 5], "p": arr[:, 6]})
    return status, r, y[0], y[1], quad, grid
