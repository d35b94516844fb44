"""Batch pipelines behind the CLI: lambda sweeps, region scans and the figure bundle."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig, Sweep
from .document import (
    REGION_COLUMNS,
    SWEEP_COLUMNS,
    export_csv,
    export_json,
    region_rows,
    run_portrait,
    write_csv,
)
from .errors import ValidationError
from .portrait import (
    HamiltonianField,
    find_critical_points,
    horizontal_zero_levels,
    level_topology,
    sweep_merge_tracking,
)
from .stagnation import MULTI_ZERO_ALPHA0, feasible_region_sample, stagnation_levels
from .svg import render_region_svg, render_svg
from .wave_model import WaveClassId, WaveParameters, admissible_lambda, classify_regime, thetas

__all__ = [
    "MERGE_COLUMNS",
    "FIG1_RANGE",
    "common_zero_lambda",
    "region_grid",
    "run_region",
    "run_sweep",
    "write_portrait",
    "reproduce_figures",
    "Check",
]

MERGE_COLUMNS = ("lambda", "x", "y", "det_hessian", "side")
FIG1_RANGE = (MULTI_ZERO_ALPHA0, 50.0)
FIG2_RIGHT = (-51.0, 2.30)
FIG3 = (-20.0, 4.39, 4.60, 0.05)


def common_zero_lambda(alpha0: float, m: int = 1, n: int = 1) -> float:
    """lambda making Y_m = m pi / theta1 a zero of U0 (W1): theta0 (Y_m - 1) + lambda = n pi."""
    th0, th1 = thetas(alpha0)
    return n * math.pi + th0 * (1.0 - m * math.pi / th1)


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def write_portrait(doc, out_dir, outputs=("svg", "csv", "json")) -> list[Path]:
    out_dir = Path(out_dir)
    written = []
    if "svg" in outputs:
        written.append(write_text(out_dir / "portrait.svg", render_svg(doc)))
    if "csv" in outputs:
        written += export_csv(doc, out_dir)
    if "json" in outputs:
        written.append(export_json(doc, out_dir / "portrait.json"))
    return written


# ---------------------------------------------------------------------------
# region
# ---------------------------------------------------------------------------


def region_grid(lo: float, hi: float, steps: int, extra=()) -> list[float]:
    """Uniform alpha0 samples (plus ``extra`` points in range), skipping alpha0 = 0."""
    if steps < 2:
        raise ValidationError("region sweep needs steps >= 2")
    if not lo < hi:
        raise ValidationError(f"empty alpha0 range {lo}:{hi}")
    vals = {float(v) for v in np.linspace(lo, hi, steps)}
    vals |= {float(v) for v in extra if lo <= v <= hi}
    return sorted(v for v in vals if v != 0.0)


def run_region(alphas, out_dir, resolution: int = 401) -> tuple[list, list[Path]]:
    bands = feasible_region_sample(alphas, resolution)
    out_dir = Path(out_dir)
    paths = [
        write_csv(out_dir / "region.csv", REGION_COLUMNS, region_rows(bands)),
        write_text(out_dir / "region.svg", render_region_svg(bands, (min(alphas), max(alphas)))),
    ]
    return bands, paths


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _generic_sweep(cfg: RunConfig, lams):
    rows = []
    for lam in lams:
        if admissible_lambda(cfg.alpha0, lam).value == "infeasible":
            rows.append({"lambda": lam, "feasible": False, "saddle_x": None, "topology": None, "critical_points": 0})
            continue
        p = WaveParameters.create(cfg.alpha0, lam, cfg.epsilon, cfg.sign)
        pts = find_critical_points(HamiltonianField(p), [], safety_net=False)
        levels = stagnation_levels(p)
        topo = level_topology(pts, len(levels) - 1) if levels else None
        rows.append({"lambda": lam, "feasible": True, "saddle_x": None, "topology": topo,
                     "critical_points": len(pts)})
    return rows, []


def run_sweep(cfg: RunConfig, out_dir) -> tuple[list, list, list[Path]]:
    """Critical points along a lambda sweep; merges refined by bisection for W1."""
    if not isinstance(cfg.lam, Sweep):
        raise ValidationError("sweep needs lambda=sweep(lo,hi,steps)")
    sw = cfg.lam
    if classify_regime(cfg.alpha0) == WaveClassId.W1:
        res = sweep_merge_tracking(cfg.alpha0, cfg.epsilon, (sw.lo, sw.hi), sw.steps, cfg.sign)
        rows = [
            {"lambda": s.lam, "feasible": s.feasible, "saddle_x": s.saddle_x, "topology": s.topology,
             "critical_points": len(s.critical_points)}
            for s in res.samples
        ]
        merges = [{"lambda": m.lam, "x": m.x, "y": m.y, "det_hessian": m.det, "side": m.side} for m in res.merges]
    else:
        rows, merges = _generic_sweep(cfg, sw.values())
    out_dir = Path(out_dir)
    paths = [
        write_csv(out_dir / "sweep.csv", SWEEP_COLUMNS, rows),
        write_csv(out_dir / "merges.csv", MERGE_COLUMNS, merges),
    ]
    return rows, merges, paths


# ---------------------------------------------------------------------------
# figure bundle
# ---------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    informational: bool = False

    def line(self) -> str:
        tag = "INFO" if self.informational else ("PASS" if self.ok else "FAIL")
        return f"{tag} {self.name}: {self.detail}"


@dataclass
class Bundle:
    checks: list = field(default_factory=list)

    def check(self, name, ok, detail="", informational=False):
        self.checks.append(Check(name, bool(ok), detail, informational))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks if not c.informational)


def _portrait(alpha0, lam, eps, out_dir, heatmap=False):
    cfg = RunConfig(alpha0=alpha0, lam=lam, epsilon=eps, heatmap=heatmap)
    doc = run_portrait(cfg)
    write_portrait(doc, out_dir)
    return doc


def _layer_of(y, cuts):
    return sum(y > c for c in cuts)


def reproduce_figures(out_dir) -> Bundle:
    out = Path(out_dir)
    b = Bundle()

    # Fig. 1: reachable stagnation levels
    lo, hi = FIG1_RANGE
    alphas = region_grid(lo, hi, 121, extra=(-5.0, -1.0, 1.0, 10.0))
    bands, _ = run_region(alphas, out / "fig1")
    single = [x for x in alphas if x >= MULTI_ZERO_ALPHA0]
    bed = {x: any(bd.alpha0 == x and bd.y0_min == 0.0 for bd in bands) for x in single}
    b.check("fig1 bed stagnation iff alpha0 >= -pi^2",
            all(bed[x] == (x >= -math.pi**2) for x in single), f"{len(single)} alpha0 samples")
    tops = [max(bd.y0_max for bd in bands if bd.alpha0 == x) for x in single if any(bd.alpha0 == x for bd in bands)]
    b.check("fig1 max Y0 increasing in alpha0", all(t1 > t0 for t0, t1 in zip(tops, tops[1:])),
            f"max Y0 from {tops[0]:.6f} to {tops[-1]:.6f}")
    w2 = [bd for bd in bands if bd.alpha0 == -1.0]
    b.check("fig1 W2 band [0, 1-pi/4]",
            len(w2) == 1 and w2[0].y0_min == 0.0 and abs(w2[0].y0_max - (1 - math.pi / 4)) < 1e-10,
            f"{[(bd.y0_min, bd.y0_max) for bd in w2]}")

    a0, lam_left, lam_right, eps = FIG3

    # Fig. 2 left: exact common zero; upper layer ii.b, lower ii.a
    lam_cz = common_zero_lambda(a0)
    doc = _portrait(a0, lam_cz, eps, out / "fig2_left")
    topo = [s["topology"] for s in doc.stagnation]
    b.check("fig2_left topologies", topo == ["ii.a", "ii.b"], f"lambda={lam_cz!r} topologies={topo}")
    b.check("fig2_left common zero flagged", [s["common_zero"] for s in doc.stagnation] == [False, True])
    sad = [c for c in doc.critical_points if c["kind"] == "saddle" and abs(c["x"] - math.pi / 2) < 1e-6]
    b.check("fig2_left saddle at pi/2", len(sad) == 1, f"{len(sad)} saddle(s)")

    # Fig. 2 right: two ii.a layers separated by a flat streamline
    a2, l2 = FIG2_RIGHT
    doc = _portrait(a2, l2, eps, out / "fig2_right")
    p2 = WaveParameters.create(a2, l2, eps)
    cuts = [y for y in horizontal_zero_levels(HamiltonianField(p2), 1.0) if 0.0 < y < 1.0]
    ys = [s["y0"] for s in doc.stagnation]
    topo = [s["topology"] for s in doc.stagnation]
    b.check("fig2_right two ii.a layers", topo == ["ii.a", "ii.a"], f"levels={[round(y, 6) for y in ys]}")
    b.check("fig2_right layers separated", len({_layer_of(y, cuts) for y in ys}) == len(ys) == 2,
            f"flat streamlines at {[round(c, 6) for c in cuts]}")

    # Fig. 3 left
    doc = _portrait(a0, lam_left, eps, out / "fig3_left", heatmap=True)
    th0, _ = thetas(a0)
    exact = sorted(1 + (n * math.pi - lam_left) / th0 for n in range(0, 3) if 0 <= 1 + (n * math.pi - lam_left) / th0 <= 1)
    ys = [s["y0"] for s in doc.stagnation]
    b.check("fig3_left two critical layers", len(ys) == 2 and all(abs(u - v) < 1e-3 for u, v in zip(ys, exact)),
            f"levels={[round(y, 6) for y in ys]}")
    up = len(ys) - 1
    near = [c for c in doc.critical_points
            if c["kind"] == "saddle" and c["level_index"] == up and abs(c["x"] - math.pi / 2) < 0.05]
    b.check("fig3_left upper layer ii.b", doc.stagnation[-1]["topology"] == "ii.b" and len(near) == 1,
            f"saddle x={[round(c['x'], 6) for c in near]}")

    # Fig. 3 right
    doc = _portrait(a0, lam_right, eps, out / "fig3_right", heatmap=True)
    near = [c for c in doc.critical_points if c["kind"] == "saddle" and abs(c["x"] - math.pi / 2) < 0.05]
    b.check("fig3_right no saddle near pi/2", not near, f"{len(near)} saddle(s) within 0.05")
    b.check("fig3_right upper-layer topology", True, f"{doc.stagnation[-1]['topology']}", informational=True)

    # Fig. 3 transition
    rows, merges, _ = run_sweep(RunConfig(alpha0=a0, lam=Sweep(4.30, 4.60, 31), epsilon=eps), out / "fig3_sweep")
    inside = [m for m in merges if 4.30 < m["lambda"] < 4.60]
    b.check("fig3 merge located in (4.30, 4.60)", bool(inside),
            f"{[round(m['lambda'], 9) for m in inside]}")

    write_text(out / "checks.txt", "\n".join(c.line() for c in b.checks) + "\n")
    write_text(out / "manifest.json", json.dumps(
        {"figures": ["fig1", "fig2_left", "fig2_right", "fig3_left", "fig3_right", "fig3_sweep"],
         "ok": b.ok}, sort_keys=True, indent=1) + "\n")
    return b
