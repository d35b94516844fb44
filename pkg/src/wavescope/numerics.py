"""Root finders, adaptive Runge-Kutta stepping and contour extraction."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import kernels
from .errors import DivergedError, NoSignChangeError, SingularJacobianError, StepUnderflowError

__all__ = [
    "RootResult",
    "Newton2DResult",
    "StepResult",
    "ContourSet",
    "bracket_root",
    "newton_2d",
    "adaptive_ode_step",
    "marching_squares",
]


@dataclass(frozen=True)
class RootResult:
    x: float
    residual: float
    iterations: int
    method: str  # "bisection" | "newton" | "hybrid"


@dataclass(frozen=True)
class Newton2DResult:
    x: float
    y: float
    residual: float
    iterations: int
    history: tuple = ()


class StepResult(NamedTuple):
    state: np.ndarray
    dt_taken: float
    dt_next: float
    error: float


@dataclass
class ContourSet:
    level: float
    polylines: list = field(default_factory=list)
    grid_shape: tuple = (0, 0)
    closed: list = field(default_factory=list)


def bracket_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    fprime: Callable[[float], float] | None = None,
    max_iter: int = 300,
) -> RootResult:
    """Find a root of ``f`` inside a sign-changing bracket.

    Plain bisection by default. With ``fprime`` a Newton step is tried first
    and bisection takes over whenever Newton leaves the current bracket, so
    convergence is still guaranteed (the functions we feed in have cot
    poles, which makes unbracketed Newton unsafe).

    Stops once ``|f(x)| <= tol`` or the bracket is narrower than ``tol``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    lo, hi = float(lo), float(hi)
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return RootResult(lo, 0.0, 0, "bisection")
    if fhi == 0.0:
        return RootResult(hi, 0.0, 0, "bisection")
    if not (flo * fhi < 0.0):
        raise NoSignChangeError(f"no sign change on [{lo!r}, {hi!r}]")

    used_newton = used_bisection = False
    x = 0.5 * (lo + hi)
    fx = f(x)
    it = 0
    while it < max_iter:
        it += 1
        if abs(fx) <= tol or hi - lo <= tol:
            break
        if (fx < 0.0) == (flo < 0.0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        xn = None
        if fprime is not None:
            d = fprime(x)
            if d != 0.0 and math.isfinite(d):
                cand = x - fx / d
                if lo < cand < hi:
                    xn = cand
                    used_newton = True
        if xn is None:
            xn = lo + 0.5 * (hi - lo)
            used_bisection = True
        x = xn
        fx = f(x)
    if fprime is None or not used_newton:
        method = "bisection"
    elif used_bisection:
        method = "hybrid"
    else:
        method = "newton"
    return RootResult(x, fx, it, method)


def newton_2d(F, jacobian, seed, tol=1e-12, max_iter=50, max_step=None) -> Newton2DResult:
    """Newton's method for a 2x2 system with an analytic Jacobian.

    ``F(x, y) -> (f1, f2)`` and ``jacobian(x, y) -> ((a, b), (c, d))``.
    ``max_step`` optionally clips the Newton step length.
    """
    x, y = float(seed[0]), float(seed[1])
    f1, f2 = F(x, y)
    res = math.hypot(f1, f2)
    history = [res]
    for it in range(1, max_iter + 1):
        if res <= tol:
            return Newton2DResult(x, y, res, it - 1, tuple(history))
        (a, b), (c, d) = jacobian(x, y)
        det = a * d - b * c
        if abs(det) < 1e-14:
            raise SingularJacobianError(f"singular jacobian at ({x!r}, {y!r}), det={det!r}")
        dx = (d * f1 - b * f2) / det
        dy = (a * f2 - c * f1) / det
        if max_step is not None:
            n = math.hypot(dx, dy)
            if n > max_step:
                dx *= max_step / n
                dy *= max_step / n
        x -= dx
        y -= dy
        f1, f2 = F(x, y)
        res = math.hypot(f1, f2)
        history.append(res)
        if not math.isfinite(res):
            raise DivergedError("newton iterate is not finite")
    if res <= tol:
        return Newton2DResult(x, y, res, max_iter, tuple(history))
    raise DivergedError(f"newton did not converge in {max_iter} iterations (residual {res:.3e})")


def adaptive_ode_step(rhs, state, dt, tol, dt_max=math.inf) -> StepResult:
    """One accepted Dormand-Prince 5(4) step.

    Rejected attempts halve ``dt``; the proposal for the next step lies in
    ``[dt_taken/10, 5*dt_taken]`` (and below ``dt_max``). Raises
    :class:`StepUnderflowError` when ``dt`` drops below 1e-12.
    """
    y = np.asarray(state, dtype=float)
    h = float(dt)
    while True:
        if h < kernels.DT_MIN:
            raise StepUnderflowError(f"step underflow (dt={h:.3e})")
        ks = []
        for row in kernels.DP45_A:
            yi = y.copy()
            for coef, k in zip(row, ks):
                if coef:
                    yi = yi + h * coef * k
            ks.append(np.asarray(rhs(yi), dtype=float))
        # the last tableau row is the 5th-order solution; ks[-1] is f(y_new)
        y_new = y + h * sum(b * k for b, k in zip(kernels.DP45_B, ks) if b)
        err_vec = h * sum(e * k for e, k in zip(kernels.DP45_E, ks) if e)
        err = float(np.max(np.abs(err_vec))) if err_vec.size else 0.0
        if err <= tol:
            return StepResult(y_new, h, min(kernels.next_dt(h, err, tol), dt_max), err)
        h *= 0.5


def _join_segments(ids: np.ndarray, pts: np.ndarray):
    """Chain marching-squares segments that share a grid edge."""
    point_of = {}
    by_edge = defaultdict(list)
    for s in range(ids.shape[0]):
        a, b = int(ids[s, 0]), int(ids[s, 1])
        point_of[a] = (pts[s, 0], pts[s, 1])
        point_of[b] = (pts[s, 2], pts[s, 3])
        by_edge[a].append(s)
        by_edge[b].append(s)

    used = np.zeros(ids.shape[0], dtype=bool)

    def walk(seg, from_edge):
        chain = []
        while True:
            used[seg] = True
            a, b = int(ids[seg, 0]), int(ids[seg, 1])
            nxt = b if a == from_edge else a
            chain.append(nxt)
            cand = [s for s in by_edge[nxt] if not used[s]]
            if not cand:
                return chain
            seg, from_edge = cand[0], nxt

    lines, closed = [], []
    for s in range(ids.shape[0]):
        if used[s]:
            continue
        a = int(ids[s, 0])
        fwd = walk(s, a)
        if fwd[-1] == a:
            edges = [a] + fwd
            is_closed = True
        else:
            back = []
            cand = [t for t in by_edge[a] if not used[t]]
            if cand:
                back = walk(cand[0], a)
            edges = back[::-1] + [a] + fwd
            is_closed = False
        lines.append(np.array([point_of[e] for e in edges], dtype=float))
        closed.append(is_closed)
    return lines, closed


def marching_squares(grid, level, xs=None, ys=None, segments=None) -> ContourSet:
    """Level curves of ``grid[iy, ix]`` by linear interpolation on cell edges.

    Saddle cells are resolved with the mean of the four corners. Output
    coordinates are physical when the uniform axes ``xs``/``ys`` are given,
    grid indices otherwise. Closed polylines repeat their first vertex.
    """
    f = np.asarray(grid, dtype=float)
    if f.ndim != 2 or f.shape[0] < 2 or f.shape[1] < 2:
        raise ValueError("grid must be at least 2x2")
    seg_fn = segments or kernels.contour_segments
    ids, pts = seg_fn(f, float(level))
    lines, closed = _join_segments(ids, pts)
    if xs is not None or ys is not None:
        xs = np.arange(f.shape[1], dtype=float) if xs is None else np.asarray(xs, dtype=float)
        ys = np.arange(f.shape[0], dtype=float) if ys is None else np.asarray(ys, dtype=float)
        dx = (xs[-1] - xs[0]) / (xs.size - 1)
        dy = (ys[-1] - ys[0]) / (ys.size - 1)
        lines = [np.column_stack([xs[0] + p[:, 0] * dx, ys[0] + p[:, 1] * dy]) for p in lines]
    return ContourSet(float(level), lines, (f.shape[1], f.shape[0]), closed)
