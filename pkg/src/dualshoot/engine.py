"""Engine selection: compiled kernel if available, pure Python otherwise.

Set ``DUALSHOOT_PURE=1`` in the environment to force the pure engine (used
by the benchmark and the parity tests). ``ENGINE`` names the active backend.
"""
from __future__ import annotations

import os
import warnings

from . import _pure

if os.environ.get("DUALSHOOT_PURE", "").strip() not in ("", "0"):
    _backend = _pure
else:
    try:
        from . import _kernel as _backend  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - exercised only in pure installs
        warnings.warn("compiled kernel unavailable; falling back to the pure-Python engine",
                      RuntimeWarning, stacklevel=2)
        _backend = _pure

ENGINE: str = _backend.ENGINE_NAME

CONVERGED = _pure.CONVERGED
OVERSHOOT = _pure.OVERSHOOT
UNDERSHOOT = _pure.UNDERSHOOT
RMAX = _pure.RMAX
UNDERFLOW = _pure.UNDERFLOW
NONFINITE = _pure.NONFINITE

integrate_radial_raw = _backend.integrate_radial_raw


def model_params(model) -> tuple:
    """Flatten a DualModel into the engine parameter tuple."""
    phi_fam = _pure.PHI_IDENTITY if model.phi.family == "identity" else _pure.PHI_BOUNDED_RATIONAL
    f_fam = _pure.F_SUM_POWERS if model.f.family == "sum_powers" else _pure.F_POWER_RATIO
    return (phi_fam, model.phi.b, f_fam, model.f.alpha, model.f.beta, model.f.mu1, model.f.mu2)


def get_backends() -> dict:
    """Both engines keyed by name (compiled one only if importable)."""
    out = {"pure": _pure.integrate_radial_raw}
    try:
        from . import _kernel
        out["compiled"] = _kernel.integrate_radial_raw
    except ImportError:
        pass
    return out
