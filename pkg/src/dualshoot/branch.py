"""Branch continuation, the mass map, and the prescribed-mass problem.

Traces lam -> v_lam over a log-spaced grid with warm-started brackets,
evaluates rho(lam) = ||Phi_inv(v_lam)||_2^2, finds all lam with rho(lam) = c
by bracketed root finding (re-shooting at every evaluation), and classifies
the (N, alpha, beta) regime into the nine-case existence table with its
threshold masses

    c_lower = min(||U||_2^2, a_star^N ||V||_2^2),
    c_upper = max(||U||_2^2, a_star^N ||V||_2^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .asymptotics import exponent_sign, mass_exponent
from .errors import InsufficientPoints, NoRootInBranch, SolverError, ToleranceNotReached
from .models import DualModel
from .solver import (DEFAULT_CONFIG, RadialProfile, ShootingConfig,
                     semilinear_ground_state, shoot_ground_state)

POINTS_PER_DECADE_DEFAULT = 8
ROOT_MASS_RTOL = 1e-4


@dataclass(frozen=True)
class GridSpec:
    """Log-spaced frequency grid for branch tracing."""

    lambda_min: float
    lambda_max: float
    count: int

    def __post_init__(self):
        if not (0.0 < self.lambda_min < self.lambda_max):
            raise ValueError("need 0 < lambda_min < lambda_max")
        if self.count < 2:
            raise ValueError("count must be >= 2")

    @classmethod
    def per_decade(cls, lambda_min: float, lambda_max: float,
                   density: int = POINTS_PER_DECADE_DEFAULT) -> "GridSpec":
        decades = math.log10(lambda_max / lambda_min)
        return cls(lambda_min, lambda_max, max(2, int(round(decades * density)) + 1))

    def lambdas(self) -> np.ndarray:
        return np.geomspace(self.lambda_min, self.lambda_max, self.count)

    def doubled(self) -> "GridSpec":
        return GridSpec(self.lambda_min, self.lambda_max, 2 * self.count - 1)


@dataclass
class BranchPoint:
    """Scalars of one accepted branch sample; profile kept for every 4th point."""

    lam: float
    v0: float
    rho: float
    mass_v: float
    grad_sq: float
    energy: float
    sup_norm: float
    pohozaev_residual: float
    profile: RadialProfile | None = None

    @classmethod
    def from_profile(cls, p: RadialProfile, keep: bool) -> "BranchPoint":
        return cls(lam=p.lam, v0=p.v0, rho=p.mass_dual, mass_v=p.mass_v,
                   grad_sq=p.grad_sq, energy=p.energy, sup_norm=p.sup_norm,
                   pohozaev_residual=p.pohozaev_residual, profile=p if keep else None)


@dataclass
class Branch:
    """Ordered lam-sweep with warm-start metadata and failure records."""

    model: DualModel
    grid_spec: GridSpec
    points: list
    config: ShootingConfig
    warnings: list = field(default_factory=list)

    def lambdas(self) -> np.ndarray:
        return np.array([p.lam for p in self.points])

    def rhos(self) -> np.ndarray:
        return np.array([p.rho for p in self.points])

    def profile_at(self, point: BranchPoint) -> RadialProfile:
        """Stored profile, or a deterministic regeneration from the stored v0."""
        if point.profile is not None:
            return point.profile
        prof = shoot_ground_state(self.model, point.lam, self.config, v0_hint=point.v0)
        point.profile = prof
        return prof

    def nearest_point(self, lam: float) -> BranchPoint:
        return min(self.points, key=lambda p: abs(math.log(p.lam / lam)))


def _warm_hint(lam: float, lam_prev: float, v0_prev: float, model: DualModel) -> float:
    """Scale the previous shooting value by the regime's asymptotic power law."""
    q = model.f.alpha if lam < lam_prev else model.f.beta
    return v0_prev * (lam / lam_prev) ** (1.0 / (q - 2.0))


def trace_branch(model: DualModel, grid_spec: GridSpec,
                 config: ShootingConfig = DEFAULT_CONFIG,
                 keep_every: int = 4) -> Branch:
    """Solve the ground state on every grid lambda, warm-starting outward.

    The sweep starts cold at the grid point nearest lam = 1 and walks outward
    in both directions so each bracket is seeded from its neighbor through
    the asymptotic scaling law. A failed point is retried cold; if it fails
    again the sweep stops in that direction and the branch carries a warning
    record (partial branches are returned, never silently padded).
    """
    lams = grid_spec.lambdas()
    start = int(np.argmin(np.abs(np.log(lams))))
    branch = Branch(model=model, grid_spec=grid_spec, points=[], config=config)

    def solve_at(lam, hint):
        try:
            return shoot_ground_state(model, lam, config, v0_hint=hint)
        except SolverError:
            if hint is None:
                raise
            return shoot_ground_state(model, lam, config, v0_hint=None)

    by_index: dict = {}
    try:
        prof = solve_at(float(lams[start]), None)
    except SolverError as exc:
        raise SolverError(f"branch trace failed at its anchor lambda={lams[start]:g}: {exc}")
    by_index[start] = prof

    for direction in (+1, -1):
        prev = by_index[start]
        i = start + direction
        while 0 <= i < len(lams):
            lam = float(lams[i])
            hint = _warm_hint(lam, prev.lam, prev.v0, model)
            try:
                prof = solve_at(lam, hint)
            except SolverError as exc:
                branch.warnings.append(f"point lambda={lam:g} failed after retry: {exc}")
                break
            by_index[i] = prof
            prev = prof
            i += direction

    for rank, i in enumerate(sorted(by_index)):
        branch.points.append(BranchPoint.from_profile(by_index[i], keep=(rank % keep_every == 0)))
    return branch


@dataclass(frozen=True)
class MassMapSegment:
    lam_lo: float
    lam_hi: float
    direction: int              # +1 increasing, -1 decreasing


@dataclass(frozen=True)
class MassMap:
    """Piecewise-monotone decomposition of the sampled mass map."""

    segments: tuple
    small_exponent: float       # lam-exponent of rho as lam -> 0
    large_exponent: float       # lam-exponent of rho as lam -> inf
    small_limit: str            # "zero" | "finite" | "infinity"
    large_limit: str


_LIMIT_BY_SIGN_SMALL = {1: "zero", 0: "finite", -1: "infinity"}
_LIMIT_BY_SIGN_LARGE = {1: "infinity", 0: "finite", -1: "zero"}


def mass_map(branch: Branch) -> MassMap:
    """Monotone segments of sampled rho plus endpoint limits from the exponent table."""
    pts = branch.points
    if not pts:
        raise InsufficientPoints("empty branch")
    model = branch.model
    segs = []
    if len(pts) >= 2:
        direction = 0
        seg_start = pts[0].lam
        for a, b in zip(pts, pts[1:]):
            d = 1 if b.rho > a.rho else -1
            if direction == 0:
                direction = d
            elif d != direction:
                segs.append(MassMapSegment(seg_start, a.lam, direction))
                seg_start = a.lam
                direction = d
        segs.append(MassMapSegment(seg_start, pts[-1].lam, direction))
    e_small = mass_exponent(model.dim, model.f.alpha)
    e_large = mass_exponent(model.dim, model.f.beta)
    return MassMap(segments=tuple(segs),
                   small_exponent=e_small, large_exponent=e_large,
                   small_limit=_LIMIT_BY_SIGN_SMALL[exponent_sign(model.dim, model.f.alpha)],
                   large_limit=_LIMIT_BY_SIGN_LARGE[exponent_sign(model.dim, model.f.beta)])


# --- regime classification --------------------------------------------------

CASE_IDS = ("i", "ii", "iii_1", "iii_2", "iv_1", "iv_2", "v_1", "v_2", "vi")

# expected root counts per case, keyed by qualitative mass region
_EXPECTED = {
    "i":     {"any_c": ">=1"},
    "ii":    {"c_small": "0", "between_thresholds": ">=1", "c_large": "0",
              "near_thresholds": "unknown"},
    "iii_1": {"below_V_threshold": ">=1", "c_large": "0"},
    "iii_2": {"above_U_threshold": ">=1", "c_small": "0"},
    "iv_1":  {"c_small": ">=2", "c_large": "0"},
    "iv_2":  {"c_small": "0", "c_large": ">=2"},
    "v_1":   {"below_U_threshold": ">=1", "c_large": "0"},
    "v_2":   {"above_V_threshold": ">=1", "c_small": "0"},
    "vi":    {"any_c": ">=1"},
}

_CRITICAL_RTOL = 1e-12


@dataclass(frozen=True)
class RegimeClassification:
    """One of the nine existence cases, with threshold masses when relevant."""

    case_id: str
    dim: int
    alpha: float
    beta: float
    mass_critical: float
    thresholds: dict
    expected: dict

    @property
    def needs_u(self) -> bool:
        return self.case_id in ("ii", "iii_2", "v_1")

    @property
    def needs_v(self) -> bool:
        return self.case_id in ("ii", "iii_1", "v_2")


def _cmp_critical(e: float, crit: float) -> int:
    if abs(e - crit) <= _CRITICAL_RTOL * crit:
        return 0
    return -1 if e < crit else 1


def classify_regime(model: DualModel, config: ShootingConfig = DEFAULT_CONFIG,
                    compute_thresholds: bool = True) -> RegimeClassification:
    """Pure order-relation classification of (N, alpha, beta).

    Threshold masses ||U||^2 and a_star^N ||V||^2 are computed by the
    semilinear solver only when the case references them (and
    ``compute_thresholds`` is left on).
    """
    crit = model.mass_critical
    sa = _cmp_critical(model.f.alpha, crit)
    sb = _cmp_critical(model.f.beta, crit)
    case = {
        (-1, -1): "i", (0, 0): "ii", (-1, 0): "iii_1", (0, -1): "iii_2",
        (-1, 1): "iv_1", (1, -1): "iv_2", (0, 1): "v_1", (1, 0): "v_2",
        (1, 1): "vi",
    }[(sa, sb)]

    thresholds: dict = {}
    cls = RegimeClassification(case_id=case, dim=model.dim, alpha=model.f.alpha,
                               beta=model.f.beta, mass_critical=crit,
                               thresholds=thresholds, expected=dict(_EXPECTED[case]))
    if compute_thresholds and (cls.needs_u or cls.needs_v):
        if cls.needs_u:
            u = semilinear_ground_state(model.f.mu1, model.f.alpha, model.dim, config)
            thresholds["U_mass"] = u.mass_v
        if cls.needs_v:
            v = semilinear_ground_state(model.f.mu2, model.f.beta, model.dim, config)
            thresholds["V_mass_scaled"] = model.a_star ** model.dim * v.mass_v
        if case == "ii":
            thresholds["c_lower"] = min(thresholds["U_mass"], thresholds["V_mass_scaled"])
            thresholds["c_upper"] = max(thresholds["U_mass"], thresholds["V_mass_scaled"])
    return cls


def expected_count_for(cls: RegimeClassification, c: float,
                       rho_range: tuple | None = None,
                       near_band: float = 0.10):
    """(expected label, conclusive flag) for one prescribed mass.

    Labels: "0", ">=1", ">=2", "unknown". Within ``near_band`` (relative) of
    any referenced threshold the verdict is flagged inconclusive; for the
    mixed cases, whose theorem bounds are qualitative, the sampled mass-map
    extremum stands in for the threshold.
    """
    case = cls.case_id

    def near(thr):
        return abs(c - thr) <= near_band * thr

    if case in ("i", "vi"):
        return ">=1", True
    if case == "ii":
        lo, hi = cls.thresholds["c_lower"], cls.thresholds["c_upper"]
        if near(lo) or near(hi):
            return "unknown", False
        if c < lo or c > hi:
            return "0", True
        return ">=1", True
    if case in ("iii_1", "v_2"):
        thr = cls.thresholds["V_mass_scaled"]
        below_label = ">=1" if case == "iii_1" else "0"
        above_label = "0" if case == "iii_1" else ">=1"
        if near(thr):
            return "unknown", False
        return (below_label if c < thr else above_label), True
    if case in ("iii_2", "v_1"):
        thr = cls.thresholds["U_mass"]
        below_label = "0" if case == "iii_2" else ">=1"
        above_label = ">=1" if case == "iii_2" else "0"
        if near(thr):
            return "unknown", False
        return (below_label if c < thr else above_label), True
    # mixed cases: threshold is the sampled extremum of the mass map
    if rho_range is None:
        return "unknown", False
    lo, hi = rho_range
    if case == "iv_1":
        if near(hi):
            return "unknown", False
        return (">=2" if c < hi else "0"), True
    # iv_2
    if near(lo):
        return "unknown", False
    return (">=2" if c > lo else "0"), True


# --- prescribed mass --------------------------------------------------------

def solve_prescribed_mass(model: DualModel, c: float, branch: Branch,
                          config: ShootingConfig = DEFAULT_CONFIG):
    """All (lam, profile) on the sampled branch with rho(lam) = c.

    Each sign change of rho - c between adjacent branch points is refined by
    a bracketed root finder in log(lam); every evaluation re-shoots the
    ground state. Roots are certified by an independent cold re-shoot to
    |rho - c|/c <= 1e-4. Raises NoRootInBranch (with the classifier verdict)
    when no sign change exists.
    """
    if not c > 0.0:
        raise ValueError("prescribed mass c must be positive")
    pts = branch.points
    if len(pts) < 2:
        raise InsufficientPoints("branch has fewer than two points")

    brackets = []
    for a, b in zip(pts, pts[1:]):
        fa, fb = a.rho - c, b.rho - c
        if fa == 0.0:
            brackets.append((a, a))
        elif fa * fb < 0.0:
            brackets.append((a, b))
    if pts[-1].rho == c:
        brackets.append((pts[-1], pts[-1]))

    if not brackets:
        cls = classify_regime(model, config)
        label, _ = expected_count_for(cls, c, rho_range=_rho_extrema(branch))
        verdict = "nonexistence expected" if label == "0" else "sweep may be too narrow"
        raise NoRootInBranch(c, verdict)

    roots = []
    for a, b in brackets:
        if a is b:
            lam_star = a.lam
        else:
            last = {"lam": a.lam, "v0": a.v0}

            def rho_minus_c(loglam):
                lam = 10.0 ** loglam
                hint = _warm_hint(lam, last["lam"], last["v0"], model)
                prof = shoot_ground_state(model, lam, config, v0_hint=hint)
                last["lam"], last["v0"] = lam, prof.v0
                return prof.mass_dual - c

            lam_star = 10.0 ** brentq(rho_minus_c, math.log10(a.lam), math.log10(b.lam),
                                      xtol=1e-13, rtol=8.9e-16)
        prof = shoot_ground_state(model, lam_star, config)  # independent certification
        if abs(prof.mass_dual - c) / c > ROOT_MASS_RTOL:
            raise ToleranceNotReached(
                f"root at lambda={lam_star:g} certifies to |rho-c|/c = "
                f"{abs(prof.mass_dual - c) / c:g} > {ROOT_MASS_RTOL:g}")
        if not any(abs(math.log(lam_star / l0)) < 1e-6 for l0, _ in roots):
            roots.append((lam_star, prof))
    roots.sort(key=lambda t: t[0])
    return roots


def _rho_extrema(branch: Branch):
    rhos = branch.rhos()
    return float(np.min(rhos)), float(np.max(rhos))


def find_normalized_solutions(model: DualModel, c: float,
                              grid_spec: GridSpec | None = None,
                              config: ShootingConfig = DEFAULT_CONFIG,
                              branch: Branch | None = None):
    """Trace (or reuse) a branch and solve rho = c, densifying once if the
    classifier predicts more roots than the grid resolved.

    Returns (roots, branch, classification).
    """
    if branch is None:
        if grid_spec is None:
            grid_spec = GridSpec.per_decade(1e-3, 1e3)
        branch = trace_branch(model, grid_spec, config)
    cls = classify_regime(model, config)
    try:
        roots = solve_prescribed_mass(model, c, branch, config)
    except NoRootInBranch:
        roots = []
    label, _ = expected_count_for(cls, c, rho_range=_rho_extrema(branch))
    want_two = label == ">=2"
    if want_two and len(roots) < 2:
        branch = trace_branch(model, branch.grid_spec.doubled(), config)
        try:
            roots = solve_prescribed_mass(model, c, branch, config)
        except NoRootInBranch:
            roots = []
    if not roots:
        verdict = "nonexistence expected" if label == "0" else "sweep may be too narrow"
        raise NoRootInBranch(c, verdict)
    return roots, branch, cls


@dataclass(frozen=True)
class ProbeRow:
    c: float
    found: int
    expected: str
    status: str                 # "pass" | "fail" | "inconclusive"


@dataclass(frozen=True)
class ProbeReport:
    rows: tuple

    @property
    def any_fail(self) -> bool:
        return any(r.status == "fail" for r in self.rows)

    @property
    def any_inconclusive(self) -> bool:
        return any(r.status == "inconclusive" for r in self.rows)


def _count_satisfies(label: str, n: int) -> bool:
    if label == "0":
        return n == 0
    if label == ">=1":
        return n >= 1
    if label == ">=2":
        return n >= 2
    return True


def existence_probe(model: DualModel, c_grid, branch: Branch,
                    config: ShootingConfig = DEFAULT_CONFIG,
                    solve=None) -> ProbeReport:
    """Empirical cross-check of the classifier against the root solver.

    Mismatches within 10% of a referenced threshold, or in the outer 10%
    (log-scale) bands of the swept mass range where brackets may be cut off
    by the sweep itself, are reported inconclusive rather than failed.
    ``solve`` may supply a cached c -> roots callable.
    """
    cls = classify_regime(model, config)
    rho_lo, rho_hi = _rho_extrema(branch)
    log_span = math.log(rho_hi / rho_lo) if rho_hi > rho_lo else 0.0
    rows = []
    for c in c_grid:
        if solve is not None:
            roots = solve(c)
        else:
            try:
                roots = solve_prescribed_mass(model, c, branch, config)
            except NoRootInBranch:
                roots = []
        n = len(roots)
        label, conclusive = expected_count_for(cls, c, rho_range=(rho_lo, rho_hi))
        ok = _count_satisfies(label, n)
        if rho_lo < c < rho_hi and log_span > 0.0:
            edge = min(math.log(c / rho_lo), math.log(rho_hi / c)) / log_span
            if edge < 0.10:
                conclusive = False
        if label == "unknown":
            status = "inconclusive"
        elif ok:
            status = "pass"
        else:
            status = "fail" if conclusive else "inconclusive"
        rows.append(ProbeRow(c=float(c), found=n, expected=label, status=status))
    return ProbeReport(rows=tuple(rows))
