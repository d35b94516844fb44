"""Self-contained portrait documents and their CSV/JSON serializations.

A :class:`PortraitDocument` holds only JSON types (dicts, lists, str,
float, int, bool, None), so ``parse_json(export_json_text(doc)) == doc``
and the SVG renderer can work from the document alone.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .config import RunConfig
from .errors import ValidationError
from .portrait import HamiltonianField, PhasePortrait, build_portrait
from .wave_model import WaveParameters

__all__ = [
    "PortraitDocument",
    "CRITICAL_POINT_COLUMNS",
    "STAGNATION_COLUMNS",
    "REGION_COLUMNS",
    "SWEEP_COLUMNS",
    "run_portrait",
    "document_from_portrait",
    "export_json_text",
    "parse_json",
    "export_json",
    "export_csv",
    "region_rows",
    "write_csv",
    "csv_text",
]

SCHEMA = "wavescope.portrait/1"
CRITICAL_POINT_COLUMNS = ("x", "y", "kind", "det_hessian", "provenance")
STAGNATION_COLUMNS = ("y0", "lambda", "feasible")
REGION_COLUMNS = ("alpha0", "class", "y0_min", "y0_max", "multi_zero", "certificates")
SWEEP_COLUMNS = ("lambda", "feasible", "saddle_x", "topology", "critical_points")


@dataclass
class PortraitDocument:
    config: dict
    wave: dict
    window: list
    layers: list
    stagnation: list
    critical_points: list
    isoclines: list
    streamlines: list
    integrated: list = field(default_factory=list)
    heatmap: dict | None = None
    warnings: list = field(default_factory=list)
    max_level_residual: float = 0.0
    schema: str = SCHEMA


def _pts(a) -> list:
    return [[float(x), float(y)] for x, y in np.asarray(a, dtype=float).reshape(-1, 2)]


def document_from_portrait(portrait: PhasePortrait, config: dict | None = None) -> PortraitDocument:
    p = portrait.params
    eta = HamiltonianField(p).surface_coefficient()
    wave = {
        "class": p.class_id.name,
        "alpha0": p.alpha0,
        "lambda": p.lam,
        "epsilon": p.epsilon,
        "theta0": p.theta0,
        "theta1": p.theta1,
        "amplitude": p.amplitude,
        "amplitude_sign": p.amplitude_sign.value,
        "lambda_status": p.lambda_status.value,
        "surface_coefficient": eta,
    }
    stag = []
    for i, lev in enumerate(portrait.stagnation):
        stag.append({
            "y0": lev.y0,
            "lambda": lev.lam,
            "feasible": lev.feasible,
            "topology": portrait.topologies[i] if i < len(portrait.topologies) else None,
            "common_zero": portrait.common_zero[i],
        })
    cps = []
    for c in portrait.critical_points:
        (a, b), (_b, d) = c.hessian
        cps.append({
            "x": c.x,
            "y": c.y,
            "kind": c.kind,
            "det_hessian": c.det,
            "provenance": c.provenance,
            "level_index": c.level_index,
            "hessian": [[a, b], [b, d]],
        })
    isos = [
        {
            "kind": br.kind,
            "anchor_level": br.anchor_level,
            "max_deviation": br.max_deviation,
            "clipped": br.clipped,
            "points": _pts(br.samples),
        }
        for br in portrait.isoclines
    ]
    streams = [{"level": lvl, "points": _pts(poly)} for lvl, poly in portrait.streamlines]
    integ = [
        {
            "start": _pts(s.points[:1])[0],
            "closed": s.closed,
            "status": s.status,
            "h_drift": s.h_drift,
            "level": s.level,
            "points": _pts(s.points),
        }
        for s in portrait.integrated
    ]
    heat = None
    if portrait.speed is not None:
        sp = portrait.speed
        heat = {"nx": int(sp.shape[1]), "ny": int(sp.shape[0]), "values": [[float(v) for v in row] for row in sp]}
    return PortraitDocument(
        config=config if config is not None else {},
        wave=wave,
        window=[float(v) for v in portrait.window],
        layers=[[float(a), float(b)] for a, b in portrait.layers],
        stagnation=stag,
        critical_points=cps,
        isoclines=isos,
        streamlines=streams,
        integrated=integ,
        heatmap=heat,
        warnings=list(portrait.degenerate_warnings),
        max_level_residual=float(portrait.max_level_residual),
    )


def run_portrait(config: RunConfig) -> PortraitDocument:
    """classify -> amplitude -> levels -> layers -> isoclines -> critical points -> streamlines."""
    if config.is_sweep:
        raise ValidationError("run_portrait needs a single lambda; use the sweep command for sweep(...)")
    params = WaveParameters.create(config.alpha0, config.lam, config.epsilon, config.sign)
    portrait = build_portrait(
        params,
        grid=tuple(config.grid),
        n_levels=config.streamline_levels,
        seeds=config.seed_overrides,
        heatmap=config.heatmap,
    )
    return document_from_portrait(portrait, config.echo())


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _check_finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ValidationError(f"non-finite value {obj!r} in document")
    if isinstance(obj, dict):
        for v in obj.values():
            _check_finite(v)
    elif isinstance(obj, list):
        for v in obj:
            _check_finite(v)


def export_json_text(doc: PortraitDocument) -> str:
    data = asdict(doc)
    _check_finite(data)
    return json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def parse_json(text: str) -> PortraitDocument:
    data = json.loads(text)
    if data.get("schema") != SCHEMA:
        raise ValidationError(f"unsupported document schema {data.get('schema')!r}")
    names = {f.name for f in fields(PortraitDocument)}
    unknown = set(data) - names
    if unknown:
        raise ValidationError(f"unknown document fields: {', '.join(sorted(unknown))}")
    return PortraitDocument(**data)


def export_json(doc: PortraitDocument, path) -> Path:
    path = Path(path)
    _write_text(path, export_json_text(doc))
    return path


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_csv(path, columns, rows) -> Path:
    path = Path(path)
    _write_text(path, csv_text(columns, rows))
    return path


def export_csv(doc: PortraitDocument, out_dir) -> list[Path]:
    """critical_points.csv and stagnation.csv in ``out_dir``."""
    out_dir = Path(out_dir)
    return [
        write_csv(out_dir / "critical_points.csv", CRITICAL_POINT_COLUMNS, doc.critical_points),
        write_csv(out_dir / "stagnation.csv", STAGNATION_COLUMNS, doc.stagnation),
    ]


def region_rows(bands) -> list[dict]:
    return [
        {
            "alpha0": b.alpha0,
            "class": b.class_id.name,
            "y0_min": b.y0_min,
            "y0_max": b.y0_max,
            "multi_zero": b.multi_zero,
            "certificates": len(b.certificates),
        }
        for b in bands
    ]
