"""Verification battery: invariants, scaling laws, and regime checks.

Each check produces a stable id, a pass/fail/inconclusive status, and the
witness values behind the verdict. Suites group the checks by subject
("transform", "solver", "asymptotics", "branch"; "all" runs every suite that
applies to the configured model). The catalog battery runs the shipped
configs with a fixed suite assignment and namespaces check ids as
"<config>:<check>".

Exit-code semantics of a verdict: 0 when every check passed, 1 when any
check failed, 2 when nothing failed but at least one check was inconclusive.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import engine
from .asymptotics import (Regime, dilate_profile, exponent_sign, limit_profile,
                          mass_exponent, mass_limit_ratios, rescale, supnorm_band)
from .branch import (GridSpec, classify_regime, existence_probe, mass_map,
                     solve_prescribed_mass, trace_branch)
from .errors import NoRootInBranch
from .models import DualModel, NonlinearityModel, PhiModel, check_growth_conditions
from .solver import (integrate_radial, profile_diagnostics, semilinear_ground_state,
                     shoot_ground_state, TrajectoryClass)

POHOZAEV_TOL = 1e-5
MASS_LAW_TOL = 0.05
SUP_CONV_TOL = 0.05
BAND_LIMIT_TOL = 0.05
FLATNESS_TOL = 0.05


@dataclass(frozen=True)
class CheckResult:
    id: str
    description: str
    status: str                  # "pass" | "fail" | "inconclusive"
    witness: dict

    def renamed(self, prefix: str) -> "CheckResult":
        return CheckResult(f"{prefix}:{self.id}", self.description, self.status, self.witness)


@dataclass
class Verdict:
    suite: str
    engine_name: str
    checks: list
    profiles_produced: int
    max_pohozaev: float

    @property
    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "inconclusive": 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    @property
    def exit_code(self) -> int:
        counts = self.counts
        if counts["fail"]:
            return 1
        if counts["inconclusive"]:
            return 2
        return 0

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "engine": self.engine_name,
            "checks": [{"id": c.id, "description": c.description, "status": c.status,
                        "witness": c.witness} for c in self.checks],
            "counts": self.counts,
            "profiles_produced": self.profiles_produced,
            "max_pohozaev_residual": self.max_pohozaev,
            "exit_code": self.exit_code,
        }


class VerifyContext:
    """Shared caches plus the profile log used by the acceptance gate."""

    def __init__(self, run_config, tol_scale: float = 1.0):
        self.model: DualModel = run_config.model
        self.shooting = run_config.shooting
        self.sweep = run_config.sweep
        self.tol = tol_scale
        self.profiles: list = []      # (lam, pohozaev_residual)
        self._cache: dict = {}

    def log(self, profile) -> None:
        self.profiles.append((profile.lam, profile.pohozaev_residual))

    def shoot(self, lam: float, model: DualModel | None = None, hint: float | None = None):
        prof = shoot_ground_state(model or self.model, lam, self.shooting, v0_hint=hint)
        self.log(prof)
        return prof

    def branch(self):
        if "branch" not in self._cache:
            br = trace_branch(self.model, self.sweep, self.shooting)
            for p in br.points:
                self.profiles.append((p.lam, p.pohozaev_residual))
            self._cache["branch"] = br
        return self._cache["branch"]

    def limit(self, regime: Regime):
        key = ("limit", regime)
        if key not in self._cache:
            prof = limit_profile(self.model, regime, self.shooting)
            self.log(prof)
            self._cache[key] = prof
        return self._cache[key]

    def sweep_profiles(self):
        """A sparse lambda sweep reusing branch profiles (every stored point)."""
        if "sweep_profiles" not in self._cache:
            br = self.branch()
            profs = [br.profile_at(p) for p in br.points[:: max(1, len(br.points) // 8)]]
            self._cache["sweep_profiles"] = profs
        return self._cache["sweep_profiles"]

    def classification(self):
        if "cls" not in self._cache:
            self._cache["cls"] = classify_regime(self.model, self.shooting)
        return self._cache["cls"]

    def solve_mass(self, c: float):
        """Cached prescribed-mass solve against the cached branch ([] if no root)."""
        key = ("roots", c)
        if key not in self._cache:
            try:
                roots = solve_prescribed_mass(self.model, c, self.branch(), self.shooting)
                for _, prof in roots:
                    self.log(prof)
            except NoRootInBranch:
                roots = []
            self._cache[key] = roots
        return self._cache[key]


def _result(cid, desc, ok, witness, inconclusive=False) -> CheckResult:
    status = "inconclusive" if inconclusive else ("pass" if ok else "fail")
    return CheckResult(cid, desc, status, witness)


def _is_semilinear_power(model: DualModel) -> bool:
    return model.phi.family == "identity" and model.f.alpha == model.f.beta


def _is_mass_critical(model: DualModel) -> bool:
    return (abs(model.f.alpha - model.mass_critical) < 1e-9
            and abs(model.f.beta - model.mass_critical) < 1e-9)


# --- transform suite --------------------------------------------------------

def check_bounds(ctx) -> CheckResult:
    phi = ctx.model.phi
    t = np.concatenate((np.geomspace(1e-8, 1e8, 600), [0.0]))
    vals = np.asarray(phi.phi(t))
    ok = bool(np.all(vals >= 1.0 - 1e-15) and np.all(vals <= phi.a_star + 1e-15))
    ok &= phi.phi(0.0) == 1.0
    tail = 1e6
    ok &= abs(tail * phi.phi_prime(tail)) <= 1e-4
    return _result("transform.bounds", "coefficient stays in [1, a_star] and flattens at infinity",
                   ok, {"a_star": phi.a_star, "t_phi_prime_at_1e6": tail * phi.phi_prime(tail)})


def check_roundtrip(ctx) -> CheckResult:
    phi = ctx.model.phi
    t = np.concatenate((-np.geomspace(1e-6, 1e3, 500), [0.0], np.geomspace(1e-6, 1e3, 600)))
    rt = phi.Phi_inv(phi.Phi(t))
    err = np.max(np.abs(rt - t) / np.maximum(1.0, np.abs(t)))
    odd = np.max(np.abs(phi.Phi(-t) + phi.Phi(t)))
    even = np.max(np.abs(phi.phi(-t) - phi.phi(t)))
    ok = bool(err <= 1e-9 * ctx.tol and odd == 0.0 and even == 0.0)
    return _result("transform.roundtrip", "transform inverts to 1e-9 and has exact parity",
                   ok, {"max_roundtrip_err": float(err), "points": int(t.size)})


def check_sandwich(ctx) -> CheckResult:
    phi = ctx.model.phi
    t = np.concatenate(([0.0], np.geomspace(1e-9, 1e6, 1200)))
    P = np.asarray(phi.Phi(t))
    hi = phi.a_star * t
    ok = bool(np.all(P >= t - 1e-12 * np.maximum(1, t))
              and np.all(P <= hi + 1e-12 * np.maximum(1, hi))
              and np.all(P <= t * np.asarray(phi.phi(t)) + 1e-12 * np.maximum(1, t)))
    return _result("transform.sandwich", "t <= Phi(t) <= a_star*t and Phi(t) <= t*phi(t)",
                   ok, {"points": int(t.size)})


def check_inverse_bounds(ctx) -> CheckResult:
    phi = ctx.model.phi
    s = np.concatenate((-np.geomspace(1e-9, 1e6, 500), [0.0], np.geomspace(1e-9, 1e6, 600)))
    inv = np.asarray(phi.Phi_inv(s))
    ok = bool(np.all(np.abs(inv) <= np.abs(s) + 1e-15)
              and np.all(np.abs(inv) >= np.abs(s) / phi.a_star - 1e-12 * np.maximum(1, np.abs(s))))
    order = np.argsort(s)
    ok &= bool(np.all(np.diff(inv[order]) >= 0.0))
    ratio = float(phi.Phi_inv(1e6) / 1e6)
    ok &= abs(ratio - 1.0 / phi.a_star) <= 1e-4
    return _result("transform.inverse_bounds",
                   "inverse is a monotone contraction with the right asymptote",
                   ok, {"inv_ratio_at_1e6": ratio, "target": 1.0 / phi.a_star})


def check_antiderivative(ctx) -> CheckResult:
    model = ctx.model
    lam = 1.0
    s = np.geomspace(1e-3, 1e3, 1100)
    h = 1e-5 * s
    fd = (np.asarray(model.g_antiderivative(lam, s + h))
          - np.asarray(model.g_antiderivative(lam, s - h))) / (2.0 * h)
    g = np.asarray(model.g_lambda(lam, s))
    rel = np.max(np.abs(fd - g) / np.maximum(np.abs(g), 1e-300))
    ok = bool(rel <= 1e-8 * ctx.tol)
    ok &= model.g_antiderivative(lam, 0.0) == 0.0
    return _result("transform.antiderivative",
                   "finite differences of the antiderivative reproduce g_lambda",
                   ok, {"max_rel_err": float(rel), "points": int(s.size)})


def check_power_law(ctx) -> CheckResult:
    model = ctx.model
    s = 1e4
    ratio = model.g_lambda(1.0, s) / s ** (model.f.beta - 1.0)
    target = model.f.mu2 / model.a_star ** model.f.beta
    ok = abs(ratio - target) <= 0.01 * target * ctx.tol
    return _result("transform.power_law", "large-amplitude power-law coefficient within 1%",
                   ok, {"ratio": float(ratio), "target": float(target)})


def check_growth(ctx) -> CheckResult:
    witness = {}
    try:
        for lam in (0.5, 1.0, 2.0):
            rep = check_growth_conditions(ctx.model, lam)
            witness[f"lam_{lam:g}"] = {c.name: c.witness for c in rep.checks
                                       if c.name in ("well_crossing", "superlinearity_near_zero")}
        ok = True
    except Exception as exc:  # ConditionNotMet / TNotFound carry the item name
        ok = False
        witness["error"] = str(exc)
    return _result("transform.growth", "sampled growth conditions hold at lam in {1/2, 1, 2}",
                   ok, witness)


def check_h2_monotone(ctx) -> CheckResult:
    model = ctx.model
    lam = 1.0
    t = np.concatenate(([0.0], np.geomspace(1e-8, 1e6, 900)))
    inv = np.asarray(model.phi.Phi_inv(t))
    h2 = lam * t - lam * inv / np.asarray(model.phi.phi(inv))
    ok = bool(np.all(np.diff(h2) >= -1e-12 * np.maximum(1.0, np.abs(h2[1:]))))
    return _result("transform.h2_monotone", "damping component of g_lambda is nondecreasing",
                   ok, {"points": int(t.size)})


# --- solver suite -----------------------------------------------------------

def check_pohozaev(ctx) -> CheckResult:
    br = ctx.branch()
    residuals = [p.pohozaev_residual for p in br.points]
    worst = max(residuals)
    ok = worst <= POHOZAEV_TOL * ctx.tol
    return _result("solver.pohozaev", "scaling-identity residual <= 1e-5 on the whole sweep",
                   ok, {"max_residual": worst, "profiles": len(residuals)})


def check_tail_rate(ctx) -> CheckResult:
    profs = ctx.sweep_profiles()
    ratios = [p.tail_kappa / math.sqrt(p.lam) for p in profs]
    ok = all(0.9 <= r <= 1.1 for r in ratios)
    return _result("solver.tail_rate", "fitted decay rate within 10% of sqrt(lambda)",
                   ok, {"min": min(ratios), "max": max(ratios)})


def check_mass_order(ctx) -> CheckResult:
    a2 = ctx.model.a_star ** 2
    br = ctx.branch()
    ok = all(p.rho <= p.mass_v * (1 + 1e-12) and p.mass_v <= a2 * p.rho * (1 + 1e-12)
             for p in br.points)
    return _result("solver.mass_order", "rho <= ||v||^2 <= a_star^2 rho pointwise",
                   ok, {"points": len(br.points), "a_star_sq": a2})


def check_shape(ctx) -> CheckResult:
    profs = ctx.sweep_profiles()
    ok = True
    for p in profs:
        interior = p.v[1:]
        ok &= bool(np.all(interior > 0.0) and np.all(np.diff(p.v) < 0.0)
                   and np.all(p.dv[1:] < 0.0))
    return _result("solver.shape", "profiles positive and strictly decreasing",
                   ok, {"profiles": len(profs)})


def check_energy_identity(ctx) -> CheckResult:
    profs = ctx.sweep_profiles()
    worst = 0.0
    for p in profs:
        n = p.dim
        lhs = p.energy
        rhs = p.grad_sq / n - 0.5 * p.lam * p.mass_dual
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), p.grad_sq / n))
    ok = worst <= POHOZAEV_TOL * ctx.tol
    return _result("solver.energy_identity",
                   "energy equals grad_sq/N - lam*rho/2 through the scaling identity",
                   ok, {"max_rel_err": worst})


def check_defect(ctx) -> CheckResult:
    profs = ctx.sweep_profiles()
    picks = [profs[0], profs[-1]]
    worst = 0.0
    for p in picks:
        d = profile_diagnostics(p, ctx.model, ctx.shooting)
        worst = max(worst, d.pde_defect)
    ok = worst <= 10.0 * ctx.shooting.ode_rel_tol * ctx.tol
    return _result("solver.defect", "re-integration defect within integrator tolerance",
                   ok, {"max_defect": worst, "bound": 10.0 * ctx.shooting.ode_rel_tol})


def check_bracket_unique(ctx) -> CheckResult:
    model = ctx.model
    lam = 1.0
    T = model.find_well_crossing(lam)
    v0s = np.geomspace(T, T * 1e4, 34)
    sides = []
    for v0 in v0s:
        try:
            cls, _ = integrate_radial(model, lam, float(v0), ctx.shooting,
                                      with_quadrature=False, store=False)
        except Exception:
            cls = TrajectoryClass.OVERSHOOT
        sides.append(1 if cls is TrajectoryClass.OVERSHOOT else 0)
    flips = sum(1 for a, b in zip(sides, sides[1:]) if a != b)
    ok = flips == 1
    return _result("solver.bracket_unique",
                   "shooting classifier changes sign exactly once at lam=1",
                   ok, {"flips": flips, "scan_points": len(sides)}, inconclusive=(flips > 1))


def check_scaling(ctx) -> CheckResult:
    model = ctx.model
    q = model.f.alpha
    n = model.dim
    p1 = ctx.shoot(1.0)
    worst = 0.0
    for lam in (1e-2, 1e2):
        p = ctx.shoot(lam)
        worst = max(worst,
                    abs(p.v0 / (lam ** (1.0 / (q - 2.0)) * p1.v0) - 1.0),
                    abs(p.mass_v / (lam ** (2.0 / (q - 2.0) - n / 2.0) * p1.mass_v) - 1.0),
                    abs(p.grad_sq / (lam ** (2.0 / (q - 2.0) + 1.0 - n / 2.0) * p1.grad_sq) - 1.0))
    ok = worst <= 1e-6 * ctx.tol
    return _result("solver.scaling", "exact frequency-scaling laws hold to 1e-6",
                   ok, {"max_rel_err": worst, "q": q})


# --- asymptotics suite -------------------------------------------------------

def check_trichotomy(ctx) -> CheckResult:
    ok = True
    for n in (3, 4, 5, 7):
        crit = 2.0 + 4.0 / n
        for e, want in ((crit - 0.4, 1), (crit, 0), (crit + 0.4, -1)):
            ok &= exponent_sign(n, e) == want
        ok &= abs(mass_exponent(n, crit)) < 1e-12
    return _result("asym.trichotomy", "mass exponent changes sign exactly at 2+4/N",
                   ok, {"dims": [3, 4, 5, 7]})


def check_dilation(ctx) -> CheckResult:
    model = ctx.model
    a = model.a_star
    v = semilinear_ground_state(model.f.mu2, model.f.beta, model.dim, ctx.shooting)
    ctx.log(v)
    vs = dilate_profile(v, a)
    n = model.dim
    ok = abs(vs.mass_v - a ** (n + 2) * v.mass_v) <= 1e-8 * vs.mass_v
    ok &= abs(vs.mass_v / a ** 2 - a ** n * v.mass_v) <= 1e-8 * vs.mass_v
    ok &= abs(vs.v0 - a * v.v0) <= 1e-12 * vs.v0
    return _result("asym.dilation", "limit-profile dilation identities hold to 1e-8",
                   ok, {"a_star": a, "V_mass": v.mass_v, "Vstar_mass": vs.mass_v})


def _mass_law(ctx, regime: Regime) -> CheckResult:
    rep = mass_limit_ratios(ctx.branch(), ctx.model, regime, ctx.shooting,
                            limit=ctx.limit(regime))
    row = rep.extreme_row
    ok = abs(row.mass_ratio - 1.0) <= MASS_LAW_TOL * ctx.tol
    cid = f"asym.mass_law_{regime.value}"
    return _result(cid, f"dual-mass power law within 5% at the {regime.value}-lambda extreme",
                   ok, {"lambda": row.lam, "mass_ratio": row.mass_ratio,
                        "limit_mass": rep.limit_mass})


def check_mass_law_small(ctx) -> CheckResult:
    return _mass_law(ctx, Regime.SMALL_LAMBDA)


def check_mass_law_large(ctx) -> CheckResult:
    return _mass_law(ctx, Regime.LARGE_LAMBDA)


def _convergence(ctx, regime: Regime) -> CheckResult:
    rep = mass_limit_ratios(ctx.branch(), ctx.model, regime, ctx.shooting,
                            limit=ctx.limit(regime))
    row = rep.extreme_row
    rel = row.sup_diff / ctx.limit(regime).sup_norm
    ok = rep.sup_converging() and rel <= SUP_CONV_TOL * ctx.tol
    cid = f"asym.convergence_{regime.value}"
    return _result(cid, "rescaled profiles approach the limit soliton monotonically",
                   ok, {"sup_rel_at_extreme": rel, "monotone": rep.sup_converging(),
                        "rows": len(rep.rows)})


def check_convergence_small(ctx) -> CheckResult:
    return _convergence(ctx, Regime.SMALL_LAMBDA)


def check_convergence_large(ctx) -> CheckResult:
    return _convergence(ctx, Regime.LARGE_LAMBDA)


def _band(ctx, regime: Regime) -> CheckResult:
    model = ctx.model
    e = model.f.alpha if regime is Regime.SMALL_LAMBDA else model.f.beta
    pts = [p for p in ctx.branch().points
           if (p.lam <= 1.0 if regime is Regime.SMALL_LAMBDA else p.lam >= 1.0)]
    table = supnorm_band(pts, e, regime)
    target = ctx.limit(regime).sup_norm ** (e - 2.0)
    rel = abs(table.limit_ratio - target) / target
    ok = table.passed and rel <= BAND_LIMIT_TOL * ctx.tol
    cid = f"asym.band_{regime.value}"
    return _result(cid, "sup-norm power band holds and matches the limit amplitude",
                   ok, {"limit_ratio": table.limit_ratio, "target": target,
                        "rel_err": rel, "in_band": table.in_band})


def check_band_small(ctx) -> CheckResult:
    return _band(ctx, Regime.SMALL_LAMBDA)


def check_band_large(ctx) -> CheckResult:
    return _band(ctx, Regime.LARGE_LAMBDA)


def check_rescale_exact(ctx) -> CheckResult:
    """Semilinear pure powers: rescaling any branch point reproduces the lam=1 profile."""
    model = ctx.model
    q = model.f.alpha
    base = ctx.shoot(1.0)
    worst = 0.0
    for lam in (1e-2, 1e2):
        p = ctx.shoot(lam)
        resc = rescale(p, q, Regime.SMALL_LAMBDA)
        itp = base.interpolator()
        ref = itp(resc.r)
        worst = max(worst, float(np.max(np.abs(resc.w - ref))))
    ok = worst <= 1e-6 * ctx.tol * base.sup_norm
    return _result("asym.rescale_exact", "exact rescaling collapses the semilinear branch",
                   ok, {"max_sup_diff": worst})


def check_critical_flat(ctx) -> CheckResult:
    lams = sorted(p.lam for p in ctx.branch().points)[:2]
    rhos = []
    br = ctx.branch()
    for lam in lams:
        pt = min(br.points, key=lambda p: abs(p.lam - lam))
        rhos.append(pt.rho)
    slope = (math.log(rhos[1]) - math.log(rhos[0])) / (math.log(lams[1]) - math.log(lams[0]))
    ok = abs(slope) <= FLATNESS_TOL * ctx.tol
    return _result("asym.critical_flat", "mass map flat at the critical exponent",
                   ok, {"lambdas": lams, "slope": slope})


# --- branch suite ------------------------------------------------------------

def check_consistency(ctx) -> CheckResult:
    br = ctx.branch()
    worst = 0.0
    for p in br.points:
        if p.profile is not None:
            worst = max(worst, abs(p.rho - p.profile.mass_dual) / p.rho,
                        abs(p.v0 - p.profile.v0) / p.v0)
    ok = worst <= 1e-10
    return _result("branch.consistency", "branch scalars match their stored profiles",
                   ok, {"max_rel_err": worst})


def check_mass_map(ctx) -> CheckResult:
    br = ctx.branch()
    mm = mass_map(br)
    ok = len(mm.segments) >= 1
    # endpoint directions must agree with the exponent-table limits
    if mm.small_limit == "zero":
        ok &= mm.segments[0].direction == 1
    elif mm.small_limit == "infinity":
        ok &= mm.segments[0].direction == -1
    if mm.large_limit == "zero":
        ok &= mm.segments[-1].direction == -1
    elif mm.large_limit == "infinity":
        ok &= mm.segments[-1].direction == 1
    return _result("branch.mass_map", "sampled monotonicity matches the endpoint limits",
                   ok, {"segments": len(mm.segments), "small": mm.small_limit,
                        "large": mm.large_limit,
                        "small_exponent": mm.small_exponent,
                        "large_exponent": mm.large_exponent})


def _probe_masses(ctx) -> list:
    br = ctx.branch()
    rhos = br.rhos()
    lo, hi = float(np.min(rhos)), float(np.max(rhos))
    cls = ctx.classification()
    if cls.case_id == "ii":
        th = cls.thresholds
        return [0.5 * th["c_lower"], math.sqrt(th["c_lower"] * th["c_upper"]),
                3.0 * th["c_upper"]]
    if cls.case_id == "iv_1":
        ends = max(rhos[0], rhos[-1])
        return [math.sqrt(ends * hi), 10.0 * hi]
    if cls.case_id == "iv_2":
        ends = min(rhos[0], rhos[-1])
        return [math.sqrt(ends * lo), 0.1 * lo]
    span = hi / lo
    inner = [lo * span ** x for x in (0.3, 0.5, 0.7)]
    return inner


def check_roots(ctx) -> CheckResult:
    cs = _probe_masses(ctx)
    found = {}
    total = 0
    ok = True
    for c in cs:
        roots = ctx.solve_mass(c)
        for _, prof in roots:
            ok &= abs(prof.mass_dual - c) / c <= 1e-4
        found[f"c={c:g}"] = len(roots)
        total += len(roots)
    ok &= total >= 1
    return _result("branch.roots", "prescribed-mass roots certified to |rho-c|/c <= 1e-4",
                   ok, {"roots": found})


def check_closed_form(ctx) -> CheckResult:
    model = ctx.model
    q = model.f.alpha
    n = model.dim
    expo = 2.0 / (q - 2.0) - n / 2.0
    if abs(expo) < 1e-9:
        return _result("branch.closed_form", "closed-form root (skipped at critical exponent)",
                       True, {"note": "mass map flat, no unique closed-form root"})
    br = ctx.branch()
    p1 = ctx.shoot(1.0)
    rho1 = p1.mass_dual
    rhos = br.rhos()
    c = math.sqrt(float(np.min(rhos)) * float(np.max(rhos)))
    lam_pred = (c / rho1) ** (1.0 / expo)
    roots = solve_prescribed_mass(model, c, br, ctx.shooting)
    ok = len(roots) == 1
    rel = abs(roots[0][0] - lam_pred) / lam_pred if roots else math.inf
    ok &= rel <= 1e-4 * ctx.tol
    if roots:
        ctx.log(roots[0][1])
    return _result("branch.closed_form", "root matches the scaling-law prediction to 1e-4",
                   ok, {"c": c, "lambda_predicted": lam_pred,
                        "lambda_found": roots[0][0] if roots else None, "rel_err": rel})


def check_cases(ctx) -> CheckResult:
    n = 3
    crit = 2.0 + 4.0 / n
    combos = {
        (3.0, 3.0): "i", (crit, crit): "ii", (3.0, crit): "iii_1", (crit, 3.0): "iii_2",
        (2.5, 4.0): "iv_1", (4.0, 2.5): "iv_2", (crit, 4.0): "v_1", (4.0, crit): "v_2",
        (11.0 / 3.0, 11.0 / 3.0): "vi",
    }
    ok = True
    seen = {}
    for (a, b), want in combos.items():
        m = DualModel(PhiModel("bounded_rational", 0.5),
                      NonlinearityModel("power_ratio", a, b, 1.0, 1.0), n)
        got = classify_regime(m, compute_thresholds=False).case_id
        seen[f"alpha={a:g},beta={b:g}"] = got
        ok &= got == want
        # amplitudes move thresholds, never the case
        m2 = DualModel(PhiModel("bounded_rational", 0.5),
                       NonlinearityModel("power_ratio", a, b, 2.0, 2.0), n)
        ok &= classify_regime(m2, compute_thresholds=False).case_id == want
    return _result("branch.cases", "all nine exponent orderings classify correctly",
                   ok, seen)


def check_probe(ctx) -> CheckResult:
    br = ctx.branch()
    cs = _probe_masses(ctx)
    report = existence_probe(ctx.model, cs, br, ctx.shooting, solve=ctx.solve_mass)
    ok = not report.any_fail
    inconclusive = (not report.any_fail) and report.any_inconclusive
    return _result("branch.probe", "root counts agree with the regime classifier",
                   ok, {f"c={r.c:g}": f"{r.found} vs {r.expected} [{r.status}]"
                        for r in report.rows},
                   inconclusive=inconclusive)


# --- registry ----------------------------------------------------------------

@dataclass(frozen=True)
class CheckDef:
    suite: str
    fn: object
    applies: object = None      # predicate(model) -> bool

    def runs_on(self, model) -> bool:
        return self.applies is None or self.applies(model)


CHECKS = (
    CheckDef("transform", check_bounds),
    CheckDef("transform", check_roundtrip),
    CheckDef("transform", check_sandwich),
    CheckDef("transform", check_inverse_bounds),
    CheckDef("transform", check_antiderivative),
    CheckDef("transform", check_power_law),
    CheckDef("transform", check_growth),
    CheckDef("transform", check_h2_monotone),
    CheckDef("solver", check_pohozaev),
    CheckDef("solver", check_tail_rate),
    CheckDef("solver", check_mass_order),
    CheckDef("solver", check_shape),
    CheckDef("solver", check_energy_identity),
    CheckDef("solver", check_defect),
    CheckDef("solver", check_bracket_unique),
    CheckDef("solver", check_scaling, _is_semilinear_power),
    CheckDef("asymptotics", check_trichotomy),
    CheckDef("asymptotics", check_dilation),
    CheckDef("asymptotics", check_mass_law_small,
             lambda m: not _is_mass_critical(m)),
    CheckDef("asymptotics", check_mass_law_large,
             lambda m: not _is_mass_critical(m)),
    CheckDef("asymptotics", check_convergence_small,
             lambda m: not _is_semilinear_power(m)),
    CheckDef("asymptotics", check_convergence_large,
             lambda m: not _is_semilinear_power(m)),
    CheckDef("asymptotics", check_band_small),
    CheckDef("asymptotics", check_band_large),
    CheckDef("asymptotics", check_rescale_exact, _is_semilinear_power),
    CheckDef("asymptotics", check_critical_flat, _is_mass_critical),
    CheckDef("branch", check_consistency),
    CheckDef("branch", check_mass_map),
    CheckDef("branch", check_roots),
    CheckDef("branch", check_closed_form, _is_semilinear_power),
    CheckDef("branch", check_cases),
    CheckDef("branch", check_probe),
)

SUITES = ("transform", "solver", "asymptotics", "branch")

# suite assignment for the shipped catalog battery
CATALOG_SUITES = {
    "reference": ("transform", "solver", "asymptotics", "branch"),
    "semilinear_cubic": ("transform", "solver", "asymptotics", "branch"),
    "subcritical": ("transform", "solver", "branch"),
    "mass_critical": ("transform", "solver", "asymptotics", "branch"),
    "mixed_iv1": ("transform", "solver", "branch"),
    "supercritical": ("transform", "solver", "branch"),
}


def run_suite(run_config, suite: str = "all", tol_scale: float = 1.0) -> Verdict:
    """Run one suite (or all) against a single run config."""
    wanted = SUITES if suite == "all" else (suite,)
    for s in wanted:
        if s not in SUITES:
            raise ValueError(f"unknown suite {s!r} (choose from {SUITES + ('all',)})")
    ctx = VerifyContext(run_config, tol_scale)
    results = []
    for cd in CHECKS:
        if cd.suite in wanted and cd.runs_on(ctx.model):
            results.append(cd.fn(ctx))
    max_poho = max((p for _, p in ctx.profiles), default=0.0)
    return Verdict(suite=suite, engine_name=engine.ENGINE, checks=results,
                   profiles_produced=len(ctx.profiles), max_pohozaev=max_poho)


def run_catalog(suite: str = "all", tol_scale: float = 1.0, threads: int = 1) -> Verdict:
    """Run the shipped catalog battery (the release gate).

    Each config runs its assigned suites; with ``threads > 1`` the configs
    run concurrently (results are assembled in catalog order either way).
    """
    from .config import load_config

    def one(name: str) -> Verdict:
        cfg = load_config(name)
        suites = CATALOG_SUITES[name] if suite == "all" else (suite,)
        checks = []
        ctx = VerifyContext(cfg, tol_scale)
        for cd in CHECKS:
            if cd.suite in suites and cd.runs_on(ctx.model):
                checks.append(cd.fn(ctx).renamed(name))
        max_poho = max((p for _, p in ctx.profiles), default=0.0)
        return Verdict(suite=suite, engine_name=engine.ENGINE, checks=checks,
                       profiles_produced=len(ctx.profiles), max_pohozaev=max_poho)

    names = list(CATALOG_SUITES)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(one, names))
    else:
        partials = [one(n) for n in names]
    checks = [c for v in partials for c in v.checks]
    return Verdict(suite=suite, engine_name=engine.ENGINE, checks=checks,
                   profiles_produced=sum(v.profiles_produced for v in partials),
                   max_pohozaev=max(v.max_pohozaev for v in partials))
