"""Deterministic file output: CSV tables and JSON documents.

All floating-point values are written with 17 significant digits so that
identical runs produce byte-identical files (17 digits round-trip doubles
exactly). JSON objects are emitted with sorted keys.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    """17-significant-digit representation of a float (nan/inf JSON-safe as strings)."""
    xf = float(x)
    if math.isnan(xf):
        return "nan"
    if math.isinf(xf):
        return "inf" if xf > 0 else "-inf"
    return "%.17g" % xf


def _json_chunks(obj, indent: int):
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sorted(obj.items(), key=lambda kv: kv[0])
        inner = ",\n".join(f'{pad}  {json.dumps(str(k))}: {_json_chunks(v, indent + 2)}'
                           for k, v in items)
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        inner = ",\n".join(f"{pad}  {_json_chunks(v, indent + 2)}" for v in seq)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = fmt(obj)
        return json.dumps(s) if s in ("nan", "inf", "-inf") else s
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_json_chunks(obj, 0) + "\n", encoding="utf-8")
    return path


def write_csv(path, header: str, rows) -> Path:
    """Rows are sequences of floats (or strings, passed through)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [header]
    for row in rows:
        lines.append(",".join(x if isinstance(x, str) else fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def profile_sidecar(profile) -> dict:
    return {
        "lambda": profile.lam,
        "v0": profile.v0,
        "mass_dual": profile.mass_dual,
        "mass_v": profile.mass_v,
        "grad_sq": profile.grad_sq,
        "energy": profile.energy,
        "pohozaev_residual": profile.pohozaev_residual,
        "tail": {"A": profile.tail_amp, "kappa": profile.tail_kappa},
    }


def write_profile(out_dir, stem: str, profile) -> tuple:
    """CSV (r,v,dv) plus the JSON sidecar; returns both paths."""
    out_dir = Path(out_dir)
    csv_path = write_csv(out_dir / f"{stem}.csv", "r,v,dv",
                         zip(profile.r, profile.v, profile.dv))
    json_path = write_json(out_dir / f"{stem}.json", profile_sidecar(profile))
    return csv_path, json_path


def write_branch(out_dir, branch) -> Path:
    rows = [(p.lam, p.v0, p.rho, p.mass_v, p.grad_sq, p.energy, p.sup_norm,
             p.pohozaev_residual) for p in branch.points]
    return write_csv(Path(out_dir) / "branch.csv",
                     "lambda,v0,rho,mass_v,grad_sq,energy,sup_norm,pohozaev_residual", rows)


def write_asymptotics(out_dir, reports) -> Path:
    rows = []
    for rep in reports:
        for r in rep.rows:
            rows.append((r.lam, r.sup_diff, r.l2_diff, r.sup_ratio, r.mass_ratio,
                         rep.regime.value))
    return write_csv(Path(out_dir) / "asymptotics.csv",
                     "lambda,sup_diff,l2_diff,sup_ratio,mass_ratio,regime", rows)


def write_roots(out_dir, roots_with_paths) -> Path:
    doc = [{"lambda": lam, "c": c, "profile": str(p)} for lam, c, p in roots_with_paths]
    return write_json(Path(out_dir) / "roots.json", doc)


def write_classification(out_dir, cls) -> Path:
    return write_json(Path(out_dir) / "classification.json",
                      {"case": cls.case_id, "thresholds": cls.thresholds,
                       "expected": cls.expected})
