"""Hamiltonian phase portraits of the linearized waves.

All four classes admit the stream function (Hamiltonian)

    H(X, Y) = eps cos(X) G(Y) + int_0^Y U0(s) ds,

with G the class generator, so that ``U = dH/dY`` and ``V = -dH/dX``.
Critical points sit where the 0-isocline (V = 0: the verticals X = n pi and
the flat levels G(Y) = 0) meets the infinity-isocline (U = 0, a graph
Y_inf(X) hugging each zero of U0).

Two families of critical points are computed:

* ``on_infinity_isocline_at_n_pi``: Y_inf(n pi), n = 0, 1, one center and one
  saddle (pattern ii.a) or two centers (ii.b);
* ``common_zero_at_half_pi``: on a flat level Y_m with G(Y_m) = 0, at
  ``cos X = -U0(Y_m) / (eps G'(Y_m))``. These are the saddles sitting at
  X = pi/2 when Y_m is an exact common zero; as lambda moves they slide
  towards X = 0 or pi and disappear when ``|U0(Y_m)| = eps |G'(Y_m)|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .errors import (
    ContinuationError,
    DegenerateCriticalPointError,
    NumericalError,
    ValidationError,
    WavescopeError,
)
from .numerics import bracket_root, marching_squares, newton_2d
from .stagnation import StagnationLevel, stagnation_levels
from .wave_model import WaveClassId, WaveParameters, bifurcation_rhs, classify_regime

__all__ = [
    "HamiltonianField",
    "CriticalPoint",
    "IsoclineBranch",
    "Streamline",
    "PhasePortrait",
    "SweepSample",
    "MergeEvent",
    "SweepResult",
    "hamiltonian",
    "hamiltonian_hessian",
    "trace_infinity_isocline",
    "find_critical_points",
    "level_topology",
    "common_zero_levels",
    "horizontal_zero_levels",
    "horizontal_family",
    "project_to_level",
    "decompose_layers",
    "integrate_streamline",
    "sweep_merge_tracking",
    "build_portrait",
]

DEGENERATE_DET = 1e-12
COMMON_ZERO_TOL = 1e-8
ISOCLINE_TOL = 1e-10
_DEDUP = 1e-7
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class HamiltonianField:
    params: WaveParameters

    @property
    def args(self):
        return self.params.kernel_args

    @property
    def epsilon(self) -> float:
        return self.params.epsilon

    @property
    def y_top(self) -> float:
        """Top of the plotting window, 1 + 2 eps."""
        return 1.0 + 2.0 * self.params.epsilon

    def G(self, y):
        return kernels.generator(int(self.params.class_id), self.params.theta1, y)

    def dG(self, y):
        return kernels.generator_dy(int(self.params.class_id), self.params.theta1, y)

    def U0(self, y):
        p = self.params
        return kernels.background_current(int(p.class_id), p.theta0, p.amplitude, p.lam, y)

    def dU0(self, y):
        p = self.params
        return kernels.background_current_dy(int(p.class_id), p.theta0, p.amplitude, p.lam, y)

    def U0_antiderivative(self, y):
        p = self.params
        return kernels.background_antiderivative(int(p.class_id), p.theta0, p.amplitude, p.lam, y)

    def H(self, x, y):
        return kernels.hamiltonian(*self.args, x, y)

    def velocity(self, x, y):
        return kernels.velocity(*self.args, x, y)

    def velocity_jacobian(self, x, y):
        """d(U, V)/d(X, Y) = [[H_XY, H_YY], [-H_XX, -H_XY]]."""
        hxx, hxy, hyy = kernels.hessian(*self.args, x, y)
        return ((hxy, hyy), (-hxx, -hxy))

    def surface_coefficient(self) -> float | None:
        """eta_hat in the rendered surface ``Y = 1 + eps eta_hat cos X``.

        From the linearized kinematic condition V = U0 d(eta)/dX at Y = 1.
        None when U0(1) = 0 (the surface itself stagnates).
        """
        u1 = float(self.U0(1.0))
        if u1 == 0.0:
            return None
        return -float(self.G(1.0)) / u1

    def surface(self, x):
        eta = self.surface_coefficient()
        if eta is None:
            return np.ones_like(np.asarray(x, dtype=float))
        return 1.0 + self.params.epsilon * eta * np.cos(x)

    @cached_property
    def h_range(self) -> float:
        """max H - min H over the plotting window; scale for relative drift."""
        xs = np.linspace(-math.pi, math.pi, 257)
        ys = np.linspace(0.0, self.y_top, 129)
        grid = kernels.hamiltonian_grid_numpy(*self.args, xs, ys)
        r = float(grid.max() - grid.min())
        return r if r > 0.0 else 1.0


def hamiltonian(field: HamiltonianField, x, y):
    return field.H(x, y)


def hamiltonian_hessian(field: HamiltonianField, x: float, y: float) -> np.ndarray:
    hxx, hxy, hyy = kernels.hessian(*field.args, x, y)
    return np.array([[hxx, hxy], [hxy, hyy]], dtype=float)


def _morse_kind(det: float) -> str:
    if abs(det) < DEGENERATE_DET:
        return "degenerate"
    return "saddle" if det < 0.0 else "center"


# ---------------------------------------------------------------------------
# isoclines
# ---------------------------------------------------------------------------


@dataclass
class IsoclineBranch:
    kind: str  # zero_isocline_vertical | zero_isocline_horizontal | infinity_isocline
    samples: np.ndarray
    anchor_level: float | None = None
    max_deviation: float = 0.0
    clipped: bool = False


def _solve_u_in_y(field, x, y_guess, tol=1e-13, max_iter=60):
    """Newton on y -> U(x, y) with the analytic dU/dY = H_YY."""
    y = float(y_guess)
    for _ in range(max_iter):
        u, _v = field.velocity(x, y)
        _hxx, _hxy, hyy = kernels.hessian(*field.args, x, y)
        if abs(hyy) < 1e-8:
            raise ContinuationError(
                f"continuation failed: |dU/dY| = {abs(hyy):.2e} at x={x:.6f}, y={y:.6f}"
            )
        step = u / hyy
        y -= step
        if abs(step) < tol and abs(u) < ISOCLINE_TOL:
            u, _v = field.velocity(x, y)
            if abs(u) < ISOCLINE_TOL:
                return y
    raise ContinuationError(f"continuation failed: newton diverged at x={x:.6f}")


def trace_infinity_isocline(field: HamiltonianField, y_star: float, n_samples: int = 256) -> IsoclineBranch:
    """The U = 0 branch through (pi/2 + n pi, y_star), sampled on [-pi, pi].

    Predictor: one step along the implicit-function slope
    ``dY/dX = eps G'(Y) sin X / (U0'(Y) + eps cos X G''(Y))``; corrector:
    Newton on ``U(X, .) = 0``. The branch is even in X, so [0, pi] is traced
    and mirrored. Samples below the bed are dropped (``clipped``).
    """
    if n_samples % 2:
        n_samples += 1
    u_star = float(field.U0(y_star))
    if abs(u_star) > 1e-8:
        raise ValidationError(f"y_star={y_star!r} is not a zero of U0 (U0={u_star:.3e})")
    xs = np.linspace(0.0, math.pi, n_samples + 1)
    ys = np.empty_like(xs)
    mid = n_samples // 2
    ys[mid] = _solve_u_in_y(field, xs[mid], y_star)

    def slope(x, y):
        hxx, hxy, hyy = kernels.hessian(*field.args, x, y)
        return -hxy / hyy  # dY/dX = -U_X / U_Y

    for stop, direction in ((n_samples, 1), (0, -1)):
        for i in range(mid, stop, direction):
            j = i + direction
            pred = ys[i] + (xs[j] - xs[i]) * slope(xs[i], ys[i])
            ys[j] = _solve_u_in_y(field, xs[j], pred)

    full_x = np.concatenate([-xs[:0:-1], xs])
    full_y = np.concatenate([ys[:0:-1], ys])
    keep = full_y >= 0.0
    samples = np.column_stack([full_x[keep], full_y[keep]])
    return IsoclineBranch(
        "infinity_isocline",
        samples,
        anchor_level=float(y_star),
        max_deviation=float(np.max(np.abs(ys - y_star))),
        clipped=not bool(keep.all()),
    )


def horizontal_zero_levels(field: HamiltonianField, y_max: float | None = None) -> list[float]:
    """Flat 0-isocline levels G(Y) = 0 in [0, y_max], bed included."""
    y_max = field.y_top if y_max is None else y_max
    p = field.params
    if p.class_id != WaveClassId.W1:
        return [0.0]
    out = []
    m = 0
    while m * math.pi / p.theta1 <= y_max:
        out.append(m * math.pi / p.theta1)
        m += 1
    return out


def decompose_layers(field: HamiltonianField) -> list[tuple[float, float]]:
    """Strips of [0, 1] separated by the flat streamlines G(Y) = 0 (W1 only)."""
    cuts = [y for y in horizontal_zero_levels(field, 1.0) if 0.0 < y < 1.0]
    edges = [0.0] + cuts + [1.0]
    return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


# ---------------------------------------------------------------------------
# critical points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalPoint:
    x: float
    y: float
    hessian: tuple
    kind: str  # center | saddle | degenerate
    provenance: str  # on_infinity_isocline_at_n_pi | common_zero_at_half_pi
    level_index: int = -1

    @property
    def det(self) -> float:
        (a, b), (_c, d) = self.hessian
        return a * d - b * b


def _make_point(field, x, y, provenance, level_index):
    hxx, hxy, hyy = (float(v) for v in kernels.hessian(*field.args, x, y))
    det = hxx * hyy - hxy * hxy
    return CriticalPoint(float(x), float(y), ((hxx, hxy), (hxy, hyy)), _morse_kind(det), provenance, level_index)


def _polish(field, x, y):
    try:
        r = newton_2d(field.velocity, field.velocity_jacobian, (x, y), tol=1e-13, max_iter=20, max_step=1e-3)
    except NumericalError:
        return x, y
    return r.x, r.y


def _vertical_root(field, n, y_star, window):
    """Root of U(n pi, .) closest to y_star inside ``window``."""
    x = n * math.pi
    lo, hi = window
    ys = np.linspace(lo, hi, 801)
    us, _ = field.velocity(x, ys)
    best = None
    for i in range(ys.size - 1):
        if us[i] == 0.0:
            cand = float(ys[i])
        elif us[i] * us[i + 1] < 0.0:
            g = lambda y: float(field.velocity(x, y)[0])  # noqa: E731
            cand = bracket_root(g, ys[i], ys[i + 1], 1e-15).x
        else:
            continue
        if best is None or abs(cand - y_star) < abs(best - y_star):
            best = cand
    return best


def _level_windows(field, levels):
    """Search window in Y around each stagnation level (midpoints between levels)."""
    top = field.y_top
    ys = [lev.y0 for lev in levels]
    out = []
    for i, y in enumerate(ys):
        lo = 0.0 if i == 0 else 0.5 * (ys[i - 1] + y)
        hi = top if i == len(ys) - 1 else 0.5 * (y + ys[i + 1])
        out.append((lo, hi))
    return out


def horizontal_family(field: HamiltonianField, y_m: float):
    """Critical points on the flat level y_m (G(y_m) = 0), as x in [0, 2 pi)."""
    eps = field.epsilon
    dg = float(field.dG(y_m))
    if eps == 0.0 or dg == 0.0:
        return []
    c = -float(field.U0(y_m)) / (eps * dg)
    if abs(c) > 1.0:
        return []
    x = math.acos(c)
    xs = [x] if x in (0.0, math.pi) else [x, TWO_PI - x]
    return [(xx, y_m) for xx in xs]


def _owning_level(field, levels, x, y, cache, tol=1e-6):
    """Index of the level whose infinity-isocline passes through (x, y), else -1."""
    xr = math.pi - abs((x % TWO_PI) - math.pi)  # fold to [0, pi]; branches are even
    for li, lev in enumerate(levels):
        if li not in cache:
            try:
                cache[li] = trace_infinity_isocline(field, lev.y0, 512)
            except WavescopeError:
                cache[li] = None
        br = cache[li]
        if br is None:
            if abs(lev.y0 - y) < 0.25 * _layer_gap(field):
                return li
            continue
        xs, ys = br.samples[:, 0], br.samples[:, 1]
        if xs.size and xs[0] <= xr <= xs[-1]:
            guess = float(np.interp(xr, xs, ys))
            try:
                yb = _solve_u_in_y(field, xr, guess)
            except ContinuationError:
                continue
            if abs(yb - y) < tol:
                return li
    return -1


def _layer_gap(field):
    p = field.params
    return math.pi / p.theta1 if p.class_id == WaveClassId.W1 else 1.0


def _nearest_level(levels, y):
    if not levels:
        return -1
    return int(np.argmin([abs(lev.y0 - y) for lev in levels]))


def find_critical_points(field: HamiltonianField, warnings: list | None = None, strict: bool = False,
                         levels: list[StagnationLevel] | None = None, safety_net: bool = True):
    """Critical points of the flow over one period X in [0, 2 pi).

    Seeds follow the structure theorem (see module docstring); a coarse
    Newton sweep then looks for anything it did not predict and reports
    it in ``warnings``. With ``strict`` a degenerate point raises
    :class:`DegenerateCriticalPointError`.
    """
    warns = [] if warnings is None else warnings
    if field.epsilon == 0.0:
        warns.append("laminar flow; no critical points isolated")
        return []
    levels = stagnation_levels(field.params) if levels is None else levels
    points: list[CriticalPoint] = []

    def add(pt):
        for q in points:
            if abs(q.x - pt.x) < _DEDUP and abs(q.y - pt.y) < _DEDUP:
                return
        points.append(pt)

    for li, (lev, window) in enumerate(zip(levels, _level_windows(field, levels))):
        for n in (0, 1):
            y = _vertical_root(field, n, lev.y0, window)
            if y is None:
                warns.append(f"no critical point found on X={n}pi near Y*={lev.y0:.6f}")
                continue
            add(_make_point(field, n * math.pi, y, "on_infinity_isocline_at_n_pi", li))

    branches = {}
    for y_m in horizontal_zero_levels(field):
        for x, y in horizontal_family(field, y_m):
            x, y = _polish(field, x, y)
            x = x % TWO_PI
            add(_make_point(field, x, y, "common_zero_at_half_pi", _owning_level(field, levels, x, y, branches)))

    points.sort(key=lambda p: (p.level_index, p.x, p.y))

    degenerate = [p for p in points if p.kind == "degenerate"]
    for p in degenerate:
        warns.append(f"degenerate critical point at ({p.x:.6f}, {p.y:.6f}), det={p.det:.3e}")
    if strict and degenerate:
        raise DegenerateCriticalPointError(warns[-1])

    if safety_net:
        for x, y in _unpredicted_points(field, points):
            warns.append(f"unpredicted critical point at ({x:.6f}, {y:.6f})")
    return points


def _unpredicted_points(field, known):
    found = []
    for x0 in np.arange(16) * (math.pi / 8):
        for y0 in np.linspace(0.0, field.y_top, 9):
            try:
                r = newton_2d(field.velocity, field.velocity_jacobian, (x0, y0), tol=1e-12,
                              max_iter=30, max_step=0.05)
            except NumericalError:
                continue
            x, y = r.x % TWO_PI, r.y
            if not (0.0 <= y <= field.surface(x) + 1e-12):
                continue
            if any(_periodic_close(x, y, p.x, p.y, 1e-6) for p in known):
                continue
            if any(_periodic_close(x, y, a, b, 1e-6) for a, b in found):
                continue
            found.append((x, y))
    return found


def _periodic_close(x1, y1, x2, y2, tol):
    dx = abs(x1 - x2) % TWO_PI
    dx = min(dx, TWO_PI - dx)
    return dx < tol and abs(y1 - y2) < tol


def level_topology(points, level_index: int) -> str:
    """'ii.a', 'ii.b' or 'other' for the critical points of one level."""
    vert = [p for p in points if p.level_index == level_index and p.provenance == "on_infinity_isocline_at_n_pi"]
    horiz = [p for p in points if p.level_index == level_index and p.provenance == "common_zero_at_half_pi"]
    vkinds = sorted(p.kind for p in vert)
    if len(vert) == 2 and not horiz and vkinds == ["center", "saddle"]:
        return "ii.a"
    if len(vert) == 2 and vkinds == ["center", "center"] and len(horiz) == 2 and all(
        p.kind == "saddle" for p in horiz
    ):
        return "ii.b"
    return "other"


def common_zero_levels(field: HamiltonianField, levels) -> list[bool]:
    """Per stagnation level: is it a common zero of U0 and G (to 1e-8)?"""
    flat = horizontal_zero_levels(field, 1.0)
    out = []
    for lev in levels:
        out.append(any(abs(y - lev.y0) < 1e-6 and abs(float(field.U0(y))) < COMMON_ZERO_TOL for y in flat))
    return out


# ---------------------------------------------------------------------------
# streamlines
# ---------------------------------------------------------------------------

_STATUS = {
    kernels.STATUS_OK: "ok",
    kernels.STATUS_CLOSED: "closed",
    kernels.STATUS_UNDERFLOW: "step_underflow",
    kernels.STATUS_MAX_STEPS: "max_steps",
    kernels.STATUS_LEFT_WINDOW: "left_window",
}


@dataclass
class Streamline:
    points: np.ndarray
    times: np.ndarray
    closed: bool
    status: str
    h_drift: float
    level: float
    message: str = ""


def integrate_streamline(
    field: HamiltonianField,
    start,
    t_span: float = 50.0,
    tol: float = 1e-10,
    dt0: float = 1e-2,
    dt_max: float = 0.25,
    max_steps: int = 200_000,
    return_tol: float = 1e-6,
    stop_on_return: bool = True,
    kernel=None,
) -> Streamline:
    """Particle path of (X', Y') = (U, V) from ``start``.

    Dormand-Prince 5(4) with step rejection on local error and on
    Hamiltonian drift (``|dH| > tol * h_range`` per step). A closed orbit is
    flagged when the path re-crosses the section through ``start`` within
    ``return_tol``. Step underflow near a saddle ends the run with a partial
    polyline and ``status='step_underflow'``; nothing is raised. A path that
    climbs above the window top ``1 + 2 eps`` stops with ``status='left_window'``.
    """
    x0, y0 = float(start[0]), float(start[1])
    if not (math.isfinite(x0) and 0.0 <= y0 <= field.y_top + 1e-12):
        raise ValidationError(f"start {start!r} outside the window")
    if not tol > 0:
        raise ValidationError("tol must be positive")
    run = kernel or kernels.streamline
    pts, ts, status, closed, drift = run(
        *field.args, x0, y0, float(t_span), float(tol), float(field.h_range),
        float(dt0), float(dt_max), int(max_steps), float(return_tol), bool(stop_on_return),
    )
    status = _STATUS[int(status)]
    msg = "step underflow" if status == "step_underflow" else ""
    return Streamline(pts, ts, bool(closed), status, float(drift), float(field.H(x0, y0)), msg)


# ---------------------------------------------------------------------------
# lambda sweeps
# ---------------------------------------------------------------------------


@dataclass
class SweepSample:
    lam: float
    feasible: bool
    critical_points: list = field(default_factory=list)
    saddle_x: float | None = None  # tracked half-pi saddle, x in [0, pi]
    topology: str | None = None


@dataclass
class MergeEvent:
    lam: float
    x: float
    y: float
    det: float
    side: str  # "x=0" | "x=pi"


@dataclass
class SweepResult:
    alpha0: float
    epsilon: float
    tracked_level: float | None
    samples: list
    merges: list
    saddle_interval: tuple | None
    saddle_x_monotone: bool


def _tracked_saddle_x(params: WaveParameters, y_m: float):
    f = HamiltonianField(params)
    pts = [x for x, _y in horizontal_family(f, y_m) if x <= math.pi]
    return pts[0] if pts else None


def _feasible(alpha0, lam):
    r = bifurcation_rhs(alpha0, lam)
    return r > 0.0 and math.isfinite(r)


def sweep_merge_tracking(alpha0: float, epsilon: float, lambda_range, steps: int,
                         sign="positive", merge_tol: float = 1e-10) -> SweepResult:
    """Follow the half-pi saddle of the uppermost critical layer across lambda.

    The flat level it lives on (Y_m with sin(theta1 Y_m) = 0) does not depend
    on lambda, so identity tracking reduces to following that level. Where
    the saddle appears or vanishes between two samples, including next to an
    infeasible stretch of lambda, the switch is refined by bisection on its
    existence; each such switch is a merge with the center at X = 0 or pi.
    """
    if classify_regime(alpha0) != WaveClassId.W1:
        raise ValidationError("merge tracking needs wave class W1 (alpha0 < -1)")
    if int(steps) < 2:
        raise ValidationError("steps must be >= 2")
    lo, hi = (float(v) for v in lambda_range)
    lams = np.linspace(lo, hi, int(steps))

    def params_at(lam):
        return WaveParameters.create(alpha0, lam, epsilon, sign)

    # flat level nearest to the uppermost stagnation level seen in the sweep
    y_m = None
    for lam in lams[::-1]:
        if not _feasible(alpha0, lam):
            continue
        p = params_at(lam)
        levels = stagnation_levels(p)
        if not levels:
            continue
        flats = [y for y in horizontal_zero_levels(HamiltonianField(p), 1.0) if y > 0.0]
        if flats:
            top = levels[-1].y0
            y_m = min(flats, key=lambda y: abs(y - top))
            break

    samples = []
    for lam in lams:
        lam = float(lam)
        if not _feasible(alpha0, lam):
            samples.append(SweepSample(lam, False))
            continue
        p = params_at(lam)
        f = HamiltonianField(p)
        warns: list = []
        pts = find_critical_points(f, warns, safety_net=False)
        sx = _tracked_saddle_x(p, y_m) if y_m is not None else None
        levels = stagnation_levels(p)
        topo = None
        if levels:
            li = _nearest_level(levels, y_m) if y_m is not None else len(levels) - 1
            for q in pts:
                if sx is not None and q.provenance == "common_zero_at_half_pi" and abs(q.x - sx) < 1e-6:
                    li = q.level_index if q.level_index >= 0 else li
            topo = level_topology(pts, li)
        samples.append(SweepSample(lam, True, pts, sx, topo))

    def exists(lam):
        return _tracked_saddle_x(params_at(lam), y_m) is not None

    def bisect_switch(a, b):
        ea = exists(a)
        while abs(b - a) > merge_tol:
            m = 0.5 * (a + b)
            if exists(m) == ea:
                a = m
            else:
                b = m
        return 0.5 * (a + b)

    def feasibility_edge(a, b):
        """Feasible endpoint of [a, b] moved to the edge of feasibility."""
        fa = _feasible(alpha0, a)
        while abs(b - a) > 1e-14 * max(1.0, abs(a)):
            m = 0.5 * (a + b)
            if _feasible(alpha0, m) == fa:
                a = m
            else:
                b = m
        return a

    merges = []
    if y_m is not None:
        for s0, s1 in zip(samples, samples[1:]):
            if s0.feasible and s1.feasible:
                if (s0.saddle_x is None) != (s1.saddle_x is None):
                    merges.append(bisect_switch(s0.lam, s1.lam))
            elif s0.feasible != s1.feasible:
                inside, outside = (s0, s1) if s0.feasible else (s1, s0)
                edge = feasibility_edge(inside.lam, outside.lam)
                if exists(edge) != (inside.saddle_x is not None):
                    merges.append(bisect_switch(inside.lam, edge))

    def u_at(lam, x):
        return float(HamiltonianField(params_at(lam)).velocity(x, y_m)[0])

    events = []
    for lam in merges:
        f = HamiltonianField(params_at(lam))
        c = -float(f.U0(y_m)) / (epsilon * float(f.dG(y_m)))
        x = 0.0 if c > 0 else math.pi
        # the merge is where U(x, Y_m) = 0 exactly; polish the existence bracket on that
        a, b = lam - merge_tol, lam + merge_tol
        if _feasible(alpha0, a) and _feasible(alpha0, b) and u_at(a, x) * u_at(b, x) < 0.0:
            lam = bracket_root(lambda t: u_at(t, x), a, b, 1e-16).x
            f = HamiltonianField(params_at(lam))
        y = _vertical_root(f, round(x / math.pi), y_m, (max(0.0, y_m - 0.05), min(1.0, y_m + 0.05)))
        y = y_m if y is None else y
        hxx, hxy, hyy = kernels.hessian(*f.args, x, y)
        events.append(MergeEvent(lam, x, y, float(hxx * hyy - hxy * hxy), "x=0" if x == 0.0 else "x=pi"))

    present = [s for s in samples if s.saddle_x is not None]
    interval = (present[0].lam, present[-1].lam) if present else None
    xs = [s.saddle_x for s in present]
    diffs = np.diff(xs) if len(xs) > 1 else np.array([])
    monotone = bool(np.all(diffs >= 0) or np.all(diffs <= 0))
    return SweepResult(float(alpha0), float(epsilon), y_m, samples, events, interval, monotone)


# ---------------------------------------------------------------------------
# assembled portrait
# ---------------------------------------------------------------------------


@dataclass
class PhasePortrait:
    params: WaveParameters
    window: tuple
    layers: list
    stagnation: list
    isoclines: list
    critical_points: list
    topologies: list
    common_zero: list
    streamlines: list  # (level, polyline ndarray)
    integrated: list
    degenerate_warnings: list
    speed: np.ndarray | None = None
    max_level_residual: float = 0.0


def project_to_level(field: HamiltonianField, pts: np.ndarray, level: float, max_step: float, iters: int = 8):
    """Newton steps along grad H pulling polyline vertices onto H = level."""
    p = np.array(pts, dtype=float)
    for _ in range(iters):
        h = field.H(p[:, 0], p[:, 1]) - level
        u, v = field.velocity(p[:, 0], p[:, 1])
        g2 = u * u + v * v  # |grad H|^2, grad H = (-V, U)
        ok = g2 > 1e-24
        if not ok.any():
            break
        s = np.zeros_like(h)
        s[ok] = h[ok] / g2[ok]
        dx = s * v  # -s * (-V)
        dy = -s * u
        n = np.hypot(dx, dy)
        big = n > max_step
        dx[big] *= max_step / n[big]
        dy[big] *= max_step / n[big]
        p[:, 0] += dx
        p[:, 1] += dy
        if np.max(np.abs(h)) == 0.0:
            break
    return p


def _clip_below(field, poly):
    """Split a polyline into the pieces lying inside the fluid."""
    inside = (poly[:, 1] >= -1e-12) & (poly[:, 1] <= field.surface(poly[:, 0]) + 1e-12)
    pieces = []
    start = None
    for i, ok in enumerate(inside):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            if i - start >= 2:
                pieces.append(poly[start:i])
            start = None
    if start is not None and len(poly) - start >= 2:
        pieces.append(poly[start:])
    return pieces


def contour_levels(field, grid_h, points, n_levels):
    hmin, hmax = float(grid_h.min()), float(grid_h.max())
    span = hmax - hmin
    levels = [hmin + (k + 0.5) * span / n_levels for k in range(n_levels)] if span > 0 else []
    extra = [float(field.H(p.x, p.y)) for p in points]
    # a few nested orbits inside each eye, which uniform levels tend to miss
    for c in points:
        if c.kind != "center":
            continue
        hc = float(field.H(c.x, c.y))
        hs = [float(field.H(q.x, q.y)) for q in points if q.kind == "saddle" and q.level_index == c.level_index]
        if hs:
            h_sep = min(hs, key=lambda h: abs(h - hc))
            extra += [hc + f * (h_sep - hc) for f in (0.25, 0.5, 0.75)]
    for h in extra:
        if hmin < h < hmax and all(abs(h - L) > 1e-12 * max(span, 1.0) for L in levels):
            levels.append(h)
    return sorted(levels)


def build_portrait(params: WaveParameters, grid=(800, 400), n_levels: int = 24, seeds=(),
                   heatmap: bool = False, heatmap_stride: int = 10) -> PhasePortrait:
    """Run the full analysis for one wave and collect everything a renderer needs."""
    f = HamiltonianField(params)
    warns: list[str] = []
    window = (-math.pi, math.pi, 0.0, f.y_top)
    levels = stagnation_levels(params)
    layers = decompose_layers(f)

    isoclines = []
    if params.epsilon > 0.0:
        for x in (-math.pi, 0.0, math.pi):
            ys = np.linspace(0.0, float(f.surface(x)), 2)
            isoclines.append(IsoclineBranch("zero_isocline_vertical", np.column_stack([np.full(2, x), ys])))
        for y in horizontal_zero_levels(f):
            if 0.0 < y < 1.0:
                xs = np.array([-math.pi, math.pi])
                isoclines.append(IsoclineBranch("zero_isocline_horizontal", np.column_stack([xs, np.full(2, y)]),
                                                anchor_level=y))
    for lev in levels if params.epsilon > 0.0 else ():
        try:
            br = trace_infinity_isocline(f, lev.y0)
        except ContinuationError as exc:
            warns.append(f"infinity-isocline at Y*={lev.y0:.6f}: {exc}")
            continue
        if br.clipped:
            warns.append(f"infinity-isocline at Y*={lev.y0:.6f} crosses the bed; clipped to Y >= 0")
        isoclines.append(br)

    points = find_critical_points(f, warns, levels=levels)
    topologies = [level_topology(points, i) for i in range(len(levels))] if params.epsilon > 0 else []
    common = common_zero_levels(f, levels)
    if params.epsilon > 0.0:
        for i, lev in enumerate(levels):
            g_signs = {
                np.sign(float(f.G(p.y)))
                for p in points
                if p.level_index == i and p.provenance == "on_infinity_isocline_at_n_pi"
            }
            has_h = any(p.level_index == i and p.provenance == "common_zero_at_half_pi" for p in points)
            if (len(g_signs) > 1) != has_h:
                warns.append(f"small-eps structure violated at Y*={lev.y0:.6f}")

    nx, ny = grid
    xs = np.linspace(window[0], window[1], nx)
    ys = np.linspace(window[2], window[3], ny)
    grid_h = kernels.hamiltonian_grid(*f.args, xs, ys)
    max_step = max((xs[1] - xs[0]), (ys[1] - ys[0]))
    streamlines = []
    worst = 0.0
    for level in contour_levels(f, grid_h, points, n_levels):
        cs = marching_squares(grid_h, level, xs, ys)
        for poly in cs.polylines:
            proj = project_to_level(f, poly, level, max_step)
            for piece in _clip_below(f, proj):
                res = float(np.max(np.abs(f.H(piece[:, 0], piece[:, 1]) - level))) / f.h_range
                worst = max(worst, res)
                streamlines.append((float(level), piece))

    integrated = []
    for seed in seeds:
        try:
            integrated.append(integrate_streamline(f, seed))
        except WavescopeError as exc:
            warns.append(f"seed {seed!r}: {exc}")

    speed = None
    if heatmap:
        sx = np.linspace(window[0], window[1], max(2, nx // heatmap_stride))
        sy = np.linspace(window[2], window[3], max(2, ny // heatmap_stride))
        speed = kernels.speed_grid(*f.args, sx, sy)

    return PhasePortrait(params, window, layers, levels, isoclines, points, topologies, common,
                         streamlines, integrated, warns, speed, worst)
