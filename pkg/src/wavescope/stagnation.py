"""Zeros of the background current: where critical layers can sit.

Closed forms per class:

* W1-W3: ``U0 = a sin(theta0 (Y-1) + lam)`` vanishes at ``Y = 1 + (n pi - lam)/theta0``.
* W4: one zero at ``Y0 = 1 - arctanh(lam^2 theta0 / (lam^2 K - 1)) / theta0``
  with ``K = theta1 coth(theta1)``, present iff
  ``lam^2 >= 1 / (K - theta0 coth(theta0))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, WavescopeError
from .numerics import bracket_root
from .wave_model import (
    WaveClassId,
    WaveParameters,
    background_current,
    background_current_derivative,
    bifurcation_rhs,
    classify_regime,
    surface_coefficient,
    thetas,
)

__all__ = [
    "ZERO_TOL",
    "MULTI_ZERO_ALPHA0",
    "StagnationLevel",
    "RegionBand",
    "stagnation_levels",
    "search_zeros",
    "zero_count",
    "feasible_region_sample",
    "class4_lambda_threshold",
    "class4_y0_bound",
]

ZERO_TOL = 1e-10
# below this alpha0 the background current may have several zeros in [0, 1]
MULTI_ZERO_ALPHA0 = -1.0 - math.pi**2
_EDGE_SLACK = 1e-12


@dataclass(frozen=True)
class StagnationLevel:
    y0: float
    lam: float
    multiplicity_index: int
    feasible: bool


@dataclass(frozen=True)
class RegionBand:
    """Closed band of attainable single-zero levels for one alpha0.

    ``y0_min``/``y0_max`` are the band's closure, refined by bisection on the
    feasibility test. ``certificates`` holds sampled (y0, lambda) pairs that
    were re-checked through :class:`WaveParameters`.
    """

    alpha0: float
    class_id: WaveClassId
    y0_min: float
    y0_max: float
    multi_zero: bool
    certificates: tuple = ()


def _clamp_unit(y: float) -> float | None:
    if -_EDGE_SLACK <= y < 0.0:
        return 0.0
    if 1.0 < y <= 1.0 + _EDGE_SLACK:
        return 1.0
    if 0.0 <= y <= 1.0:
        return y
    return None


def _sine_zeros(th0: float, lam: float) -> list[float]:
    n_lo = math.ceil((lam - th0) / math.pi - 1e-12)
    n_hi = math.floor(lam / math.pi + 1e-12)
    out = []
    for n in range(n_lo, n_hi + 1):
        y = _clamp_unit(1.0 + (n * math.pi - lam) / th0)
        if y is not None:
            out.append(y)
    return sorted(out)


def class4_lambda_threshold(alpha0: float) -> float:
    """Smallest |lambda| for which a W4 background current stagnates in [0, 1]."""
    if not alpha0 > 0.0:
        raise ValidationError(f"class-4 threshold needs alpha0 > 0, got {alpha0!r}")
    th0, _ = thetas(alpha0)
    return (surface_coefficient(alpha0) - th0 / math.tanh(th0)) ** -0.5


def class4_y0_bound(alpha0: float) -> float:
    """Supremum of W4 stagnation levels: ``1 - arctanh(theta0 / K) / theta0``."""
    if not alpha0 > 0.0:
        raise ValidationError(f"class-4 bound needs alpha0 > 0, got {alpha0!r}")
    th0, _ = thetas(alpha0)
    return 1.0 - math.atanh(th0 / surface_coefficient(alpha0)) / th0


def _class4_zero(alpha0: float, lam: float) -> float | None:
    th0, _ = thetas(alpha0)
    lam2 = lam * lam
    threshold = class4_lambda_threshold(alpha0) ** 2
    if lam2 < threshold * (1.0 - 1e-12):
        return None
    if lam2 <= threshold * (1.0 + 1e-12):
        # at the threshold the zero sits on the bed; atanh near 1 is too ill-conditioned to say so
        return 0.0
    r = lam2 * th0 / (lam2 * surface_coefficient(alpha0) - 1.0)
    if not 0.0 < r < 1.0:
        return None
    return _clamp_unit(1.0 - math.atanh(r) / th0)


def _zero_heights(params: WaveParameters) -> list[float]:
    if params.class_id == WaveClassId.W4:
        y = _class4_zero(params.alpha0, params.lam)
        return [] if y is None else [y]
    return _sine_zeros(params.theta0, params.lam)


def _single_zero_regime(alpha0: float) -> bool:
    return alpha0 >= MULTI_ZERO_ALPHA0


def stagnation_levels(params: WaveParameters) -> list[StagnationLevel]:
    """All zeros of U0 in [0, 1], ordered from the bed up.

    ``feasible`` marks the certified single-zero situation: exactly one zero
    and an alpha0 where the single-zero analysis applies.
    """
    ys = _zero_heights(params)
    certified = len(ys) == 1 and _single_zero_regime(params.alpha0)
    return [StagnationLevel(y, params.lam, i, certified) for i, y in enumerate(ys)]


def zero_count(params: WaveParameters) -> int:
    return len(_zero_heights(params))


def search_zeros(params: WaveParameters, samples: int = 4096, tol: float = 1e-14) -> list[float]:
    """Zeros of U0 on [0, 1] by sign-change scan plus bracketed Newton.

    Independent of the closed forms; used to cross-check them.
    """
    ys = np.linspace(0.0, 1.0, samples + 1)
    vals = np.asarray(background_current(params, ys), dtype=float)
    f = lambda y: float(background_current(params, y))  # noqa: E731
    df = lambda y: float(background_current_derivative(params, y))  # noqa: E731
    roots = []
    for i in range(samples + 1):
        if vals[i] == 0.0:
            roots.append(float(ys[i]))
        elif i < samples and vals[i] * vals[i + 1] < 0.0:
            roots.append(bracket_root(f, ys[i], ys[i + 1], tol, fprime=df).x)
    # endpoints within tolerance count as zeros too
    for end in (0.0, 1.0):
        if abs(f(end)) < ZERO_TOL and all(abs(r - end) > 1e-9 for r in roots):
            roots.append(end)
    return sorted(roots)


# ---------------------------------------------------------------------------
# feasible (alpha0, Y0) region
# ---------------------------------------------------------------------------


def _lambda_for_level(alpha0: float, y0: float) -> float | None:
    """A lambda putting a zero of U0 at y0, or None when no feasible one exists."""
    cls = classify_regime(alpha0)
    th0, _ = thetas(alpha0)
    if cls == WaveClassId.W4:
        K = surface_coefficient(alpha0)
        t = math.tanh(th0 * (y0 - 1.0))
        if not t < -th0 / K:
            return None
        den = th0 + t * K
        if not den < 0.0:
            return None
        return math.sqrt(t / den)
    # zeros depend on lambda only modulo pi, so reduce into (0, pi]
    lam = th0 * (1.0 - y0)
    lam -= math.pi * math.floor(lam / math.pi)
    if lam <= 0.0:
        lam += math.pi
    rhs = bifurcation_rhs(alpha0, lam)
    if not rhs > 0.0 or math.isinf(rhs):
        return None
    return lam


def _feasible_at(alpha0: float, y0: float, multi: bool) -> float | None:
    lam = _lambda_for_level(alpha0, y0)
    if lam is None:
        return None
    if multi:
        return lam
    try:
        params = WaveParameters.create(alpha0, lam)
    except WavescopeError:
        return None
    return lam if zero_count(params) == 1 else None


def _refine_edge(alpha0, y_in, y_out, multi, iters=60):
    for _ in range(iters):
        mid = 0.5 * (y_in + y_out)
        if mid in (y_in, y_out):
            break
        if _feasible_at(alpha0, mid, multi) is not None:
            y_in = mid
        else:
            y_out = mid
    return 0.5 * (y_in + y_out)


def _certify(alpha0: float, y0: float, lam: float) -> bool:
    try:
        params = WaveParameters.create(alpha0, lam)
    except WavescopeError:
        return False
    return abs(float(background_current(params, y0))) < ZERO_TOL


def feasible_region_sample(alpha0_grid, y0_resolution: int = 401) -> list[RegionBand]:
    """Bands of stagnation levels reachable by some feasible lambda.

    For alpha0 >= -1 - pi^2 a level counts when the wave it comes from has
    exactly that one zero in [0, 1]. Below that the single-zero picture no
    longer applies: every level with a feasible lambda is reported and the
    band is flagged ``multi_zero``.
    """
    if int(y0_resolution) < 2:
        raise ValidationError("y0 resolution must be >= 2")
    ys = np.linspace(0.0, 1.0, int(y0_resolution))
    bands = []
    for alpha0 in alpha0_grid:
        alpha0 = float(alpha0)
        cls = classify_regime(alpha0)
        multi = not _single_zero_regime(alpha0)
        lams = [_feasible_at(alpha0, float(y), multi) for y in ys]
        i = 0
        while i < ys.size:
            if lams[i] is None:
                i += 1
                continue
            j = i
            while j + 1 < ys.size and lams[j + 1] is not None:
                j += 1
            lo = float(ys[i]) if i == 0 else _refine_edge(alpha0, float(ys[i]), float(ys[i - 1]), multi)
            hi = float(ys[j]) if j == ys.size - 1 else _refine_edge(alpha0, float(ys[j]), float(ys[j + 1]), multi)
            certs = tuple(
                (float(ys[k]), float(lams[k]))
                for k in range(i, j + 1)
                if _certify(alpha0, float(ys[k]), lams[k])
            )
            bands.append(RegionBand(alpha0, cls, lo, hi, multi, certs))
            i = j + 1
    return bands


def bed_stagnation_feasible(bands, alpha0: float) -> bool:
    return any(b.alpha0 == alpha0 and b.y0_min == 0.0 and not b.multi_zero for b in bands)


def max_level(bands, alpha0: float) -> float | None:
    vals = [b.y0_max for b in bands if b.alpha0 == alpha0]
    return max(vals) if vals else None

