"""Radial ground-state branches of dual-transformed quasilinear Schrodinger
equations: shooting solver, mass-map continuation, prescribed-mass roots,
regime classification, and asymptotic-law verification.

The hot integration kernel is compiled (Cython); a pure-Python twin engine is
selected automatically when the extension is unavailable, or explicitly with
``DUALSHOOT_PURE=1``. ``dualshoot.engine.ENGINE`` names the active backend.
"""

__version__ = "0.1.0"

from .engine import ENGINE
from .errors import (BracketNotFound, ConditionNotMet, DualshootError,
                     InsufficientPoints, ModelError, NoRootInBranch,
                     NonFiniteState, PointFailed, SolverError,
                     StepSizeUnderflow, TNotFound, ToleranceNotReached,
                     UsageError)
from .models import (DualModel, NonlinearityModel, PhiModel,
                     check_growth_conditions, model_from_dict, model_to_dict)
from .solver import (DEFAULT_CONFIG, RadialProfile, ShootingConfig,
                     TrajectoryClass, integrate_radial, profile_diagnostics,
                     semilinear_ground_state, shoot_ground_state)
from .asymptotics import (AsymptoticsReport, Regime, RescaledProfile,
                          limit_profile, mass_exponent, mass_limit_ratios,
                          rescale, supnorm_band)
from .branch import (Branch, BranchPoint, GridSpec, RegimeClassification,
                     classify_regime, existence_probe, find_normalized_solutions,
                     mass_map, solve_prescribed_mass, trace_branch)
from .config import RunConfig, load_config

__all__ = [
    "ENGINE", "__version__",
    "DualshootError", "ModelError", "ConditionNotMet", "TNotFound", "SolverError",
    "BracketNotFound", "ToleranceNotReached", "StepSizeUnderflow", "NonFiniteState",
    "InsufficientPoints", "NoRootInBranch", "PointFailed", "UsageError",
    "PhiModel", "NonlinearityModel", "DualModel", "model_from_dict", "model_to_dict",
    "check_growth_conditions",
    "ShootingConfig", "DEFAULT_CONFIG", "TrajectoryClass", "RadialProfile",
    "integrate_radial", "shoot_ground_state", "semilinear_ground_state",
    "profile_diagnostics",
    "Regime", "RescaledProfile", "AsymptoticsReport", "rescale", "limit_profile",
    "supnorm_band", "mass_limit_ratios", "mass_exponent",
    "GridSpec", "BranchPoint", "Branch", "RegimeClassification", "trace_branch",
    "mass_map", "classify_regime", "solve_prescribed_mass",
    "find_normalized_solutions", "existence_probe",
    "RunConfig", "load_config",
]
