"""Run configuration: JSON schema, validation, and the shipped catalog.

A run config is fully deterministic (no seeds anywhere in the library):

    {
      "model":    { ... },              # required, see models.model_from_dict
      "shooting": {"bisection_tol": ..., "ode_rel_tol": ...},   # optional overrides
      "sweep":    {"lambda_min": ..., "lambda_max": ..., "count": ...},  # optional
      "output":   "path"                # optional default output directory
    }

Unknown keys are rejected at every level. ``load_config`` accepts either a
filesystem path or the name of a shipped catalog config (``reference``,
``semilinear_cubic``, ``subcritical``, ``mass_critical``, ``mixed_iv1``,
``supercritical``).
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .branch import GridSpec
from .errors import ModelError, UsageError
from .models import DualModel, model_from_dict, model_to_dict
from .solver import DEFAULT_CONFIG, ShootingConfig

_SHOOTING_KEYS = {f.name for f in dataclasses.fields(ShootingConfig)}
_SWEEP_KEYS = {"lambda_min", "lambda_max", "count"}
_TOP_KEYS = {"model", "shooting", "sweep", "output"}

DEFAULT_SWEEP = GridSpec(1e-3, 1e3, 25)

CATALOG_NAMES = ("reference", "semilinear_cubic", "subcritical",
                 "mass_critical", "mixed_iv1", "supercritical")


@dataclass(frozen=True)
class RunConfig:
    model: DualModel
    shooting: ShootingConfig
    sweep: GridSpec
    output: str | None = None
    name: str = ""

    def to_dict(self) -> dict:
        d = {"model": model_to_dict(self.model)}
        overrides = {}
        for f in dataclasses.fields(ShootingConfig):
            v = getattr(self.shooting, f.name)
            if v != getattr(DEFAULT_CONFIG, f.name):
                overrides[f.name] = v
        if overrides:
            d["shooting"] = overrides
        d["sweep"] = {"lambda_min": self.sweep.lambda_min,
                      "lambda_max": self.sweep.lambda_max, "count": self.sweep.count}
        if self.output:
            d["output"] = self.output
        return d


def config_from_dict(cfg: dict, name: str = "") -> RunConfig:
    if not isinstance(cfg, dict):
        raise ModelError("run config must be a JSON object")
    unknown = set(cfg) - _TOP_KEYS
    if unknown:
        raise ModelError(f"unknown keys in run config: {sorted(unknown)}")
    if "model" not in cfg:
        raise ModelError("run config is missing 'model'")
    model = model_from_dict(cfg["model"])

    shooting = DEFAULT_CONFIG
    if "shooting" in cfg:
        body = cfg["shooting"]
        unknown = set(body) - _SHOOTING_KEYS
        if unknown:
            raise ModelError(f"unknown keys in run config 'shooting': {sorted(unknown)}")
        kwargs = {k: (int(v) if k in ("max_bisection_iters", "max_steps") else float(v))
                  for k, v in body.items()}
        shooting = dataclasses.replace(DEFAULT_CONFIG, **kwargs)

    sweep = DEFAULT_SWEEP
    if "sweep" in cfg:
        body = cfg["sweep"]
        unknown = set(body) - _SWEEP_KEYS
        if unknown:
            raise ModelError(f"unknown keys in run config 'sweep': {sorted(unknown)}")
        missing = _SWEEP_KEYS - set(body)
        if missing:
            raise ModelError(f"missing keys in run config 'sweep': {sorted(missing)}")
        sweep = GridSpec(float(body["lambda_min"]), float(body["lambda_max"]),
                         int(body["count"]))

    output = cfg.get("output")
    if output is not None and not isinstance(output, str):
        raise ModelError("run config 'output' must be a string path")
    return RunConfig(model=model, shooting=shooting, sweep=sweep, output=output, name=name)


def catalog_path(name: str):
    return resources.files("dualshoot").joinpath("configs").joinpath(f"{name}.json")


def load_config(path_or_name: str) -> RunConfig:
    """Load a run config from a file path or a shipped catalog name."""
    p = Path(path_or_name)
    if p.exists():
        try:
            cfg = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {p} is not valid JSON: {exc}")
        return config_from_dict(cfg, name=p.stem)
    if path_or_name in CATALOG_NAMES:
        cfg = json.loads(catalog_path(path_or_name).read_text(encoding="utf-8"))
        return config_from_dict(cfg, name=path_or_name)
    raise UsageError(f"config {path_or_name!r} is neither a file nor a catalog name "
                     f"(catalog: {', '.join(CATALOG_NAMES)})")
