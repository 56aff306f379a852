"""Artifact serialization: deterministic JSON, field CSV, ensemble files.

JSON output is byte-deterministic: keys are sorted, floats are printed with
17 significant digits, and no whitespace depends on the environment.
"""

from __future__ import annotations

import csv
import json
import math
import os
from typing import Any

import numpy as np

from .ensemble import Ensemble
from .grid import PhaseSpaceField, PositionGrid, catalog_state
from .modspace import WeightedNormReport
from .moments import CovarianceReport, MarginalReport

__all__ = [
    "canonical_json",
    "write_json",
    "complex_matrix_to_pairs",
    "pairs_to_complex_matrix",
    "write_field_csv",
    "read_field_csv",
    "field_metadata",
    "norm_report_to_dict",
    "covariance_report_to_dict",
    "marginal_report_to_dict",
    "write_marginal_csv",
    "load_ensemble_json",
    "write_ensemble_json",
]


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {value!r} in JSON output")
    return format(value, ".17g")


def _plain(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.complexfloating, complex)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _emit(obj: Any) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, dict):
        inner = ",".join(f"{json.dumps(k)}:{_emit(v)}" for k, v in sorted(obj.items()))
        return "{" + inner + "}"
    if isinstance(obj, list):
        return "[" + ",".join(_emit(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__} to canonical JSON")


def canonical_json(obj: Any) -> str:
    """Serialize to deterministic JSON (sorted keys, 17-digit floats)."""
    return _emit(_plain(obj)) + "\n"


def write_json(path: str, obj: Any) -> None:
    with open(path, "w") as fh:
        fh.write(canonical_json(obj))


def complex_matrix_to_pairs(matrix: np.ndarray) -> list:
    """Row-major nested list with each entry as a [re, im] pair."""
    m = np.asarray(matrix, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def pairs_to_complex_matrix(pairs: list) -> np.ndarray:
    rows = []
    for row in pairs:
        rows.append([complex(re, im) for re, im in row])
    return np.array(rows, dtype=complex)


def field_metadata(field: PhaseSpaceField) -> dict:
    grid = field.grid
    return {
        "n": grid.n_points,
        "L": grid.x_grid.half_width,
        "dx": grid.dx,
        "dp": grid.dp,
        "hbar": grid.hbar,
    }


def write_field_csv(path: str, field: PhaseSpaceField) -> None:
    """Field CSV, row-major over x then p.

    Real fields get columns x,p,value; complex fields x,p,re,im.
    """
    is_complex = np.iscomplexobj(field.values)
    x_axis = field.x_axis
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "p", "re", "im"] if is_complex else ["x", "p", "value"])
        for j, xv in enumerate(x_axis):
            xs = format(float(xv), ".17g")
            row_vals = field.values[j]
            for i, pv in enumerate(field.p_axis):
                ps = format(float(pv), ".17g")
                if is_complex:
                    writer.writerow(
                        [xs, ps, format(row_vals[i].real, ".17g"), format(row_vals[i].imag, ".17g")]
                    )
                else:
                    writer.writerow([xs, ps, format(float(row_vals[i]), ".17g")])


def read_field_csv(path: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read a field CSV back as (x values, p values, value matrix)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header not in (["x", "p", "value"], ["x", "p", "re", "im"]):
            raise ValueError(f"{path}: unexpected header {header}")
        is_complex = header == ["x", "p", "re", "im"]
        xs, ps, vals = [], [], []
        for row in reader:
            if not row:
                continue
            xs.append(float(row[0]))
            ps.append(float(row[1]))
            vals.append(complex(float(row[2]), float(row[3])) if is_complex else float(row[2]))
    x = np.unique(np.asarray(xs))
    p = np.unique(np.asarray(ps))
    matrix = np.asarray(vals).reshape(x.size, p.size)
    return x, p, matrix


def norm_report_to_dict(report: WeightedNormReport) -> dict:
    return {
        "s": report.s,
        "window": report.window_label,
        "partials": [[cut, value] for cut, value in report.partial_norms],
        "growth_exponent": report.growth_exponent,
        "verdict": report.verdict,
    }


def covariance_report_to_dict(report: CovarianceReport) -> dict:
    return {
        "mean": list(report.mean),
        "sigma": [list(row) for row in report.sigma],
        "second_moments_fd": [list(row) for row in report.second_moments_fd],
        "residual": report.residual,
        "fd_step_change": report.fd_step_change,
        "flags": list(report.flags),
    }


def marginal_report_to_dict(report: MarginalReport) -> dict:
    return {
        "x_residual": report.x_residual,
        "p_residual": report.p_residual,
        "norm_residual": report.norm_residual,
    }


def write_marginal_csv(path: str, axis_name: str, axis: np.ndarray, values: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([axis_name, "value"])
        for a, v in zip(axis, values):
            writer.writerow([format(float(a), ".17g"), format(float(v), ".17g")])


def load_ensemble_json(
    path: str,
    grid: PositionGrid,
    hbar: float = 1.0,
    renormalize_samples: bool = False,
) -> Ensemble:
    """Load an ensemble file: JSON {label, members: [{weight, state}]}.

    Each member's ``state`` is either a catalog descriptor or a bare path to
    a sampled-state CSV.
    """
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "members" not in doc:
        raise ValueError(f"{path}: expected an object with a 'members' list")
    members = []
    for idx, entry in enumerate(doc["members"]):
        if not isinstance(entry, dict) or "weight" not in entry or "state" not in entry:
            raise ValueError(f"{path}: member {idx} needs 'weight' and 'state'")
        weight = float(entry["weight"])
        desc = str(entry["state"])
        if ":" not in desc:
            desc = f"file:{desc}"
        state = catalog_state(desc, grid, hbar, renormalize_samples=renormalize_samples)
        members.append((state, weight))
    label = str(doc.get("label", os.path.basename(path)))
    return Ensemble(tuple(members), label)


def write_ensemble_json(path: str, label: str, members: list[tuple[float, str]]) -> None:
    """Write an ensemble file from (weight, state descriptor) pairs."""
    doc = {
        "label": label,
        "members": [{"weight": w, "state": desc} for w, desc in members],
    }
    write_json(path, doc)
