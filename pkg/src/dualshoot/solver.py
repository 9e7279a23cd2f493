"""Radial ground-state solver.

Shoots on the center value v(0) for positive radially decreasing solutions of

    -v'' - (N-1)/r v' + lam*v = g_lam(v),   v'(0) = 0,  v(r) -> 0,

bisecting v(0) between a certified undershoot and a certified overshoot. The
accepted profile carries its norms (dual mass, transformed mass, gradient
square), the energy, a scaling-identity residual used as the solution-quality
gate, and fitted exponential tail coefficients; beyond the stored grid the
profile continues as v(r) ~ A r^(-(N-1)/2) exp(-kappa r) and all integrals
include that tail in closed or quadrature form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from . import engine, _pure
from .errors import (BracketNotFound, NonFiniteState, SolverError,
                     StepSizeUnderflow, ToleranceNotReached)
from .models import DualModel, NonlinearityModel, PhiModel, check_growth_conditions


class TrajectoryClass(Enum):
    OVERSHOOT = "overshoot"      # v crossed zero at finite radius
    UNDERSHOOT = "undershoot"    # v' turned positive while v was still alive
    CONVERGED = "converged"      # decayed below the floor with negative slope


@dataclass(frozen=True)
class ShootingConfig:
    """Tolerances and domain policy for the shooting solver."""

    r_max_multiplier: float = 40.0     # domain [0, M/sqrt(min(lam,1))]
    bisection_tol: float = 1e-12       # relative width of the v(0) bracket
    ode_rel_tol: float = 1e-10
    ode_abs_tol: float = 1e-12
    max_bisection_iters: int = 200
    tail_cut_rel: float = 1e-5         # truncate stored grid at v = cut*v0
    converged_floor_rel: float = 1e-10
    turn_slope_rel: float = 1e-14      # undershoot slope threshold (times v0*sqrt(lam))
    alive_floor_rel: float = 1e-12     # undershoot only counts while v >= alive*v0
    max_steps: int = 500_000

    def __post_init__(self):
        if self.r_max_multiplier < 20.0:
            raise ValueError("r_max_multiplier must be >= 20")
        for name in ("bisection_tol", "ode_rel_tol", "ode_abs_tol", "tail_cut_rel",
                     "converged_floor_rel", "turn_slope_rel", "alive_floor_rel"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")

    def scaled(self, factor: float) -> "ShootingConfig":
        """Loosen (factor > 1) or tighten the per-run tolerances."""
        return replace(self, bisection_tol=self.bisection_tol * factor,
                       ode_rel_tol=self.ode_rel_tol * factor,
                       ode_abs_tol=self.ode_abs_tol * factor)


DEFAULT_CONFIG = ShootingConfig()


@dataclass
class RawTrajectory:
    """One integration of the radial equation (possibly classification-only)."""

    status: int                 # engine status code
    r_end: float
    v_end: float
    u_end: float
    quad: tuple                 # running integrals (m, n, e, p), no sphere factor
    grid: dict | None           # arrays r, v, dv (+ m, n, e, p) if stored


@dataclass
class RadialProfile:
    """A converged radial ground state with norms and diagnostics attached.

    Grid starts at r = 0 and is truncated where the trajectory leaves the
    clean exponential decay; integrals beyond the cut come from the fitted
    tail v(r) = tail_amp * r^(-(N-1)/2) * exp(-tail_kappa * r).
    """

    lam: float
    v0: float
    dim: int
    r: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    mass_dual: float            # ||Phi_inv(v)||_2^2, the quantity prescribed as c
    mass_v: float               # ||v||_2^2
    grad_sq: float              # ||grad v||_2^2
    energy: float               # J(v) = grad_sq/2 - f_integral
    f_integral: float           # int F(Phi_inv(v)) dx
    pohozaev_residual: float    # normalized scaling-identity residual
    tail_amp: float
    tail_kappa: float
    trajectory_class: TrajectoryClass = TrajectoryClass.CONVERGED
    engine_name: str = ""
    notes: tuple = ()

    @property
    def sup_norm(self) -> float:
        return self.v0

    @property
    def rho(self) -> float:
        return self.mass_dual

    def tail_value(self, r):
        n = self.dim
        return self.tail_amp * np.asarray(r) ** (-(n - 1) / 2.0) * np.exp(-self.tail_kappa * np.asarray(r))

    def interpolator(self):
        """Callable v(r) valid on [0, inf): monotone cubic inside the grid, tail beyond."""
        pch = PchipInterpolator(self.r, self.v, extrapolate=False)
        r_cut = self.r[-1]

        def evaluate(rq):
            rq = np.asarray(rq, dtype=float)
            out = np.where(rq <= r_cut, pch(np.minimum(rq, r_cut)), self.tail_value(np.maximum(rq, r_cut)))
            return out

        return evaluate


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Independent cross-checks of a stored profile."""

    energy: float
    pohozaev_residual: float
    pde_defect: float                 # max re-integration defect, normalized
    mass_dual_quadrature: float       # grid-quadrature recomputation (incl. tail)
    mass_v_quadrature: float
    grad_sq_quadrature: float
    max_rel_mass_error: float         # stored vs quadrature, worst of the three


def _classify(status: int, v_end: float, u_end: float, v0: float) -> TrajectoryClass:
    if status == engine.OVERSHOOT:
        return TrajectoryClass.OVERSHOOT
    if status == engine.UNDERSHOOT:
        return TrajectoryClass.UNDERSHOOT
    if status == engine.CONVERGED or status == engine.RMAX:
        return TrajectoryClass.CONVERGED
    if status == engine.UNDERFLOW:
        if v_end <= 0.05 * v0 and u_end < 0.0:
            return TrajectoryClass.OVERSHOOT
        raise StepSizeUnderflow(f"step size underflow at v={v_end:g} (v0={v0:g})")
    raise NonFiniteState("integration state became non-finite")


def integrate_radial(model: DualModel, lam: float, v0: float,
                     config: ShootingConfig = DEFAULT_CONFIG,
                     with_quadrature: bool = True, store: bool = True):
    """Integrate a single shot and classify it.

    Returns (TrajectoryClass, RawTrajectory). Raises StepSizeUnderflow or
    NonFiniteState when the trajectory can not be classified.
    """
    if not v0 > 0.0:
        raise ValueError("v0 must be positive")
    if not lam > 0.0:
        raise ValueError("lambda must be positive")
    raw = _shot(model, lam, v0, config, with_quadrature, store)
    return _classify(raw.status, raw.v_end, raw.u_end, v0), raw


def _shot(model: DualModel, lam: float, v0: float, config: ShootingConfig,
          with_quad: bool, store: bool) -> RawTrajectory:
    mp = engine.model_params(model)
    r_max = config.r_max_multiplier / math.sqrt(min(lam, 1.0))
    status, r_end, v_end, u_end, quad_vals, grid = engine.integrate_radial_raw(
        mp, model.dim, lam, v0, r_max, config.ode_rel_tol, config.ode_abs_tol,
        config.converged_floor_rel, config.turn_slope_rel, config.alive_floor_rel,
        with_quad, store, config.max_steps)
    return RawTrajectory(status, r_end, v_end, u_end, quad_vals, grid)


def _bracket_side(model, lam, v0, config, notes) -> str:
    """'under', 'over', or 'accept' for one classification-only shot."""
    raw = _shot(model, lam, v0, config, with_quad=False, store=False)
    if raw.status == engine.UNDERSHOOT:
        return "under"
    if raw.status == engine.OVERSHOOT:
        return "over"
    if raw.status in (engine.CONVERGED, engine.RMAX):
        return "accept"
    notes.append(f"trial v0={v0:g} ended with engine status {raw.status}; treated as overshoot")
    return "over"


def _find_bracket(model, lam, config, v0_hint, notes):
    """Return (lo, hi) with lo classified under and hi over (or a direct accept)."""
    if v0_hint is not None and v0_hint > 0.0:
        lo, hi = v0_hint * 0.98, v0_hint * 1.02
        side_lo = _bracket_side(model, lam, lo, config, notes)
        if side_lo == "accept":
            return lo, lo
        side_hi = _bracket_side(model, lam, hi, config, notes)
        if side_hi == "accept":
            return hi, hi
        for _ in range(60):
            if side_lo == "under" and side_hi == "over":
                return lo, hi
            if side_lo == "over":          # whole bracket too high
                hi, side_hi = lo, side_lo
                lo = lo / 1.5
                side_lo = _bracket_side(model, lam, lo, config, notes)
                if side_lo == "accept":
                    return lo, lo
            elif side_hi == "under":       # whole bracket too low
                lo, side_lo = hi, side_hi
                hi = hi * 1.5
                side_hi = _bracket_side(model, lam, hi, config, notes)
                if side_hi == "accept":
                    return hi, hi
        notes.append("warm-start bracket expansion failed; falling back to cold scan")

    # cold scan upward from the potential-well crossing
    T = model.find_well_crossing(lam)
    v = T
    side = _bracket_side(model, lam, v, config, notes)
    if side == "accept":
        return v, v
    if side == "over":
        # extremely rare: T already above the ground state; scan down
        hi = v
        for _ in range(200):
            v *= 0.5
            side = _bracket_side(model, lam, v, config, notes)
            if side == "accept":
                return v, v
            if side == "under":
                return v, hi
            hi = v
        raise BracketNotFound(f"no undershoot below T={T:g} at lambda={lam:g}")
    lo = v
    for _ in range(200):
        v *= 2.0
        side = _bracket_side(model, lam, v, config, notes)
        if side == "accept":
            return v, v
        if side == "over":
            return lo, v
        lo = v
    raise BracketNotFound(f"no overshoot above T={T:g} at lambda={lam:g}")


def _fit_tail(r, v, dim, lam, cut_idx, tail_lo):
    """Fit ln(v * r^((N-1)/2)) = ln A - kappa r over the last clean decade."""
    hi_level = 10.0 * tail_lo
    sel = (v[: cut_idx + 1] <= hi_level) & (v[: cut_idx + 1] > 0.0)
    if np.count_nonzero(sel) < 6:
        hi_level = 100.0 * tail_lo
        sel = (v[: cut_idx + 1] <= hi_level) & (v[: cut_idx + 1] > 0.0)
    rr = r[: cut_idx + 1][sel]
    vv = v[: cut_idx + 1][sel]
    if rr.size < 3:
        # degenerate grid; fall back to the linearized rate
        return math.sqrt(lam)
    y = np.log(vv) + 0.5 * (dim - 1) * np.log(rr)
    slope = np.polyfit(rr, y, 1)[0]
    return -float(slope)


def shoot_ground_state(model: DualModel, lam: float,
                       config: ShootingConfig = DEFAULT_CONFIG,
                       v0_hint: float | None = None) -> RadialProfile:
    """Compute the positive radially decreasing ground state at this lambda.

    Bisects the center value between a certified undershoot and overshoot
    (bracket from the warm-start hint when given, otherwise by geometric scan
    from the potential-well crossing), then integrates the accepted shot with
    the augmented quadrature states and attaches tail-completed norms.
    """
    if not lam > 0.0:
        raise ValueError("lambda must be positive")
    check_growth_conditions(model, lam)  # raises for misconfigured models
    notes: list = []

    lo, hi = _find_bracket(model, lam, config, v0_hint, notes)
    iters = 0
    while hi - lo > config.bisection_tol * 0.5 * (hi + lo) and iters < config.max_bisection_iters:
        mid = 0.5 * (lo + hi)
        side = _bracket_side(model, lam, mid, config, notes)
        if side == "under":
            lo = mid
        elif side == "over":
            hi = mid
        else:  # accepted within resolution
            lo = hi = mid
        iters += 1
    if hi - lo > config.bisection_tol * 0.5 * (hi + lo):
        raise ToleranceNotReached(
            f"bisection stopped after {iters} iterations with bracket width {(hi - lo):g}")
    v0 = 0.5 * (lo + hi)

    raw = _shot(model, lam, v0, config, with_quad=True, store=True)
    return _finalize_profile(model, lam, v0, raw, config, notes)


def _finalize_profile(model, lam, v0, raw: RawTrajectory, config, notes) -> RadialProfile:
    grid = raw.grid
    r = grid["r"]
    v = grid["v"]
    u = grid["dv"]
    n = model.dim

    tail_lo = config.tail_cut_rel * v0
    below = np.nonzero(v <= tail_lo)[0]
    cut_idx = int(below[0]) if below.size else len(v) - 1
    # back off from any contaminated end: require positive, decreasing, falling
    while cut_idx > 0 and (v[cut_idx] <= 0.0 or u[cut_idx] >= 0.0 or v[cut_idx] >= v[cut_idx - 1]):
        cut_idx -= 1
    if v[cut_idx] > 1e-3 * v0:
        raise ToleranceNotReached(
            f"trajectory deviated before decaying three decades (v_end/v0 = {v[cut_idx] / v0:g})")
    if v[cut_idx] > 10.0 * tail_lo:
        notes.append(f"tail truncation above target level: v_cut/v0 = {v[cut_idx] / v0:g}")

    kappa = _fit_tail(r, v, n, lam, cut_idx, v[cut_idx])
    r_cut = float(r[cut_idx])
    v_cut = float(v[cut_idx])
    amp = v_cut * r_cut ** ((n - 1) / 2.0) * math.exp(kappa * r_cut)

    m_c, n_c, e_c, p_c = (float(grid["m"][cut_idx]), float(grid["n"][cut_idx]),
                          float(grid["e"][cut_idx]), float(grid["p"][cut_idx]))

    # tail integrals: r^(N-1) v^2 = amp^2 exp(-2 kappa r) makes the mass pieces closed-form
    n_tail = amp * amp * math.exp(-2.0 * kappa * r_cut) / (2.0 * kappa)
    m_tail = n_tail  # Phi_inv(v) = v + O(v^3) at tail amplitudes

    def tail_v(rr):
        return amp * rr ** (-(n - 1) / 2.0) * math.exp(-kappa * rr)

    e_tail = quad(lambda rr: amp * amp * math.exp(-2.0 * kappa * rr)
                  * (kappa + (n - 1) / (2.0 * rr)) ** 2,
                  r_cut, np.inf, epsabs=1e-14, epsrel=1e-12)[0]
    p_tail = quad(lambda rr: rr ** (n - 1) * model.f.F(model.phi.Phi_inv(tail_v(rr))),
                  r_cut, np.inf, epsabs=1e-300, epsrel=1e-10)[0]

    omega = model.sphere_area
    mass_dual = omega * (m_c + m_tail)
    mass_v = omega * (n_c + n_tail)
    grad_sq = omega * (e_c + e_tail)
    f_integral = omega * (p_c + p_tail)
    energy = 0.5 * grad_sq - f_integral
    well_integral = f_integral - 0.5 * lam * mass_dual
    pohozaev = abs(0.5 * (n - 2) * grad_sq - n * well_integral) / grad_sq

    r_out = np.concatenate(([0.0], r[: cut_idx + 1]))
    v_out = np.concatenate(([v0], v[: cut_idx + 1]))
    u_out = np.concatenate(([0.0], u[: cut_idx + 1]))

    return RadialProfile(
        lam=lam, v0=v0, dim=n, r=r_out, v=v_out, dv=u_out,
        mass_dual=mass_dual, mass_v=mass_v, grad_sq=grad_sq, energy=energy,
        f_integral=f_integral, pohozaev_residual=pohozaev,
        tail_amp=amp, tail_kappa=kappa,
        trajectory_class=TrajectoryClass.CONVERGED,
        engine_name=engine.ENGINE, notes=tuple(notes))


def semilinear_ground_state(mu: float, q: float, dim: int,
                            config: ShootingConfig = DEFAULT_CONFIG) -> RadialProfile:
    """Ground state of -Lap(U) + U = mu*U^(q-1) in R^dim (unit frequency).

    The reference soliton that controls both asymptotic regimes: with
    (mu, q) = (mu1, alpha) this is the small-frequency limit profile, with
    (mu, q) = (mu2, beta) the one entering the large-frequency limit.
    """
    if not 2.0 < q < 2.0 * dim / (dim - 2.0):
        raise ValueError(f"exponent q={q:g} outside (2, 2N/(N-2))")
    model = DualModel(PhiModel("identity"),
                      NonlinearityModel("power_ratio", q, q, mu, mu), dim)
    return shoot_ground_state(model, 1.0, config)


def profile_diagnostics(profile: RadialProfile, model: DualModel,
                        config: ShootingConfig = DEFAULT_CONFIG,
                        defect_stride: int = 8) -> DiagnosticsRecord:
    """Recompute the profile's quality numbers from its stored grid.

    The PDE defect re-integrates every ``defect_stride``-th grid interval
    from its stored left state with four forced sub-steps of the same scheme
    and reports the worst normalized mismatch against the stored right state;
    this measures integrator-tolerance propagation directly. Masses are
    recomputed by derivative-corrected trapezoid quadrature on the grid plus
    the analytic tail, independent of the augmented integrals.
    """
    n = model.dim
    lam = profile.lam
    omega = model.sphere_area
    r = profile.r
    v = profile.v
    u = profile.dv

    # quadrature recomputation (corrected trapezoid needs integrand + derivative)
    t = model.phi.Phi_inv(v)
    ph = model.phi.phi(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        rn = r ** (n - 1)
        rn1 = np.where(r > 0.0, r ** (n - 2), 0.0)
    fv = model.f.f(np.abs(t))
    w_m = rn * t * t
    w_n = rn * v * v
    w_e = rn * u * u
    dvdr = u
    dtdr = dvdr / ph
    d_m = (n - 1) * rn1 * t * t + 2.0 * rn * t * dtdr
    d_n = (n - 1) * rn1 * v * v + 2.0 * rn * v * dvdr
    src = np.empty_like(v)
    src[0] = 0.0
    if len(r) > 1:
        src[1:] = (lam * t[1:] - fv[1:] * np.sign(t[1:])) / ph[1:] - (n - 1) * u[1:] / r[1:]
    d_e = (n - 1) * rn1 * u * u + 2.0 * rn * u * src

    def ctrap(w, dw):
        h = np.diff(r)
        return float(np.sum(0.5 * h * (w[:-1] + w[1:]) + h * h / 12.0 * (dw[:-1] - dw[1:])))

    r_cut = float(r[-1])
    amp, kappa = profile.tail_amp, profile.tail_kappa
    n_tail = amp * amp * math.exp(-2.0 * kappa * r_cut) / (2.0 * kappa)
    e_tail = quad(lambda rr: amp * amp * math.exp(-2.0 * kappa * rr)
                  * (kappa + (n - 1) / (2.0 * rr)) ** 2,
                  r_cut, np.inf, epsabs=1e-14, epsrel=1e-12)[0]
    mass_dual_q = omega * (ctrap(w_m, d_m) + n_tail)
    mass_v_q = omega * (ctrap(w_n, d_n) + n_tail)
    grad_sq_q = omega * (ctrap(w_e, d_e) + e_tail)

    rel = max(abs(mass_dual_q - profile.mass_dual) / profile.mass_dual,
              abs(mass_v_q - profile.mass_v) / profile.mass_v,
              abs(grad_sq_q - profile.grad_sq) / profile.grad_sq)

    # re-integration defect on sampled intervals (skip the synthetic r=0 row)
    mp = engine.model_params(model)
    rhs = _pure._Rhs(mp, n, lam, with_quad=False)
    sqlam = math.sqrt(lam)
    defect = 0.0
    for i in range(1, len(r) - 1, defect_stride):
        h = (r[i + 1] - r[i]) / 4.0
        y = [float(v[i]), float(u[i])]
        rr = float(r[i])
        for _ in range(4):
            y = _dp45_step(rhs, rr, y, h)
            rr += h
        defect = max(defect,
                     abs(y[0] - v[i + 1]) / profile.v0,
                     abs(y[1] - u[i + 1]) / (profile.v0 * sqlam))

    well_integral = profile.f_integral - 0.5 * lam * profile.mass_dual
    pohozaev = abs(0.5 * (n - 2) * profile.grad_sq - n * well_integral) / profile.grad_sq
    energy = 0.5 * profile.grad_sq - profile.f_integral
    return DiagnosticsRecord(energy=energy, pohozaev_residual=pohozaev, pde_defect=defect,
                             mass_dual_quadrature=mass_dual_q, mass_v_quadrature=mass_v_q,
                             grad_sq_quadrature=grad_sq_q, max_rel_mass_error=rel)


def _dp45_step(rhs, r, y, h):
    """One fixed Dormand-Prince step of the 5th-order solution."""
    p = _pure
    k1 = rhs(r, y)
    k2 = rhs(r + p._C2 * h, [y[i] + h * p._A21 * k1[i] for i in range(2)])
    k3 = rhs(r + p._C3 * h, [y[i] + h * (p._A31 * k1[i] + p._A32 * k2[i]) for i in range(2)])
    k4 = rhs(r + p._C4 * h, [y[i] + h * (p._A41 * k1[i] + p._A42 * k2[i] + p._A43 * k3[i])
                             for i in range(2)])
    k5 = rhs(r + p._C5 * h, [y[i] + h * (p._A51 * k1[i] + p._A52 * k2[i] + p._A53 * k3[i]
                                         + p._A54 * k4[i]) for i in range(2)])
    k6 = rhs(r + h, [y[i] + h * (p._A61 * k1[i] + p._A62 * k2[i] + p._A63 * k3[i]
                                 + p._A64 * k4[i] + p._A65 * k5[i]) for i in range(2)])
    return [y[i] + h * (p._B1 * k1[i] + p._B3 * k3[i] + p._B4 * k4[i]
                        + p._B5 * k5[i] + p._B6 * k6[i]) for i in range(2)]
