"""Linearized steady waves with affine vorticity.

Four wave classes, selected by the laminar vorticity ``alpha0``:

=====  ===================  ===================  ==========================
class  alpha0               generator f(Y)       background current U0(Y)
=====  ===================  ===================  ==========================
W1     alpha0 < -1          sin(theta1 Y)        a sin(theta0 (Y-1) + lam)
W2     alpha0 = -1          Y                    a sin(Y - 1 + lam)
W3     -1 < alpha0 < 0      sinh(theta1 Y)       a sin(theta0 (Y-1) + lam)
W4     alpha0 > 0           sinh(theta1 Y)       a sinh(theta0 (Y-1)) + lam cosh(theta0 (Y-1))
=====  ===================  ===================  ==========================

with ``theta0 = sqrt|alpha0|`` and ``theta1 = sqrt|alpha0 + 1|``. To first order
in ``epsilon`` the steady velocity is ``U = U0 + eps cos(X) f'(Y)`` and
``V = eps sin(X) f(Y)``. Everything is dimensionless: depth 1, period 2 pi.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConstantVorticityError, InfeasibleLambdaError, LambdaZeroError, ValidationError

__all__ = [
    "WaveClassId",
    "AmplitudeSign",
    "LambdaStatus",
    "WaveParameters",
    "VelocitySample",
    "classify_regime",
    "bifurcation_rhs",
    "bifurcation_amplitude",
    "admissible_lambda",
    "background_current",
    "background_current_derivative",
    "velocity_field",
    "sturm_residual",
]

# below this |sin| the cot/coth in the bifurcation relation is treated as a pole
_POLE_GUARD = 1e-300
# |sin(lam)| below this (times |lam|) is rounding noise around a multiple of pi
_SIN_SNAP = 4e-16


class WaveClassId(enum.IntEnum):
    W1 = 1
    W2 = 2
    W3 = 3
    W4 = 4


class AmplitudeSign(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class LambdaStatus(str, enum.Enum):
    PAPER_INTERVAL = "paper_interval"
    POSITIVITY_ONLY = "positivity_only"
    INFEASIBLE = "infeasible"


def _check_alpha0(alpha0):
    alpha0 = float(alpha0)
    if not math.isfinite(alpha0):
        raise ValidationError(f"alpha0 must be finite, got {alpha0!r}")
    if alpha0 == 0.0:
        raise ConstantVorticityError()
    return alpha0


def classify_regime(alpha0: float) -> WaveClassId:
    alpha0 = _check_alpha0(alpha0)
    if alpha0 < -1.0:
        return WaveClassId.W1
    if alpha0 == -1.0:
        return WaveClassId.W2
    if alpha0 < 0.0:
        return WaveClassId.W3
    return WaveClassId.W4


def thetas(alpha0: float) -> tuple[float, float]:
    return math.sqrt(abs(alpha0)), math.sqrt(abs(alpha0 + 1.0))


def arccot(z: float) -> float:
    """Principal branch with range (0, pi)."""
    return 0.5 * math.pi - math.atan(z)


def _x_cot_x(theta: float) -> float:
    """theta * cot(theta), with the removable point at 0 and +-inf at poles."""
    if theta == 0.0:
        return 1.0
    s = math.sin(theta)
    if abs(s) < _POLE_GUARD:
        return math.copysign(math.inf, math.cos(theta) * theta)
    return theta * math.cos(theta) / s


def _x_coth_x(theta: float) -> float:
    if theta == 0.0:
        return 1.0
    return theta / math.tanh(theta)


def surface_coefficient(alpha0: float) -> float:
    """theta1 cot(theta1) for W1, 1 for W2, theta1 coth(theta1) for W3/W4."""
    cls = classify_regime(alpha0)
    _, th1 = thetas(alpha0)
    if cls == WaveClassId.W1:
        return _x_cot_x(th1)
    if cls == WaveClassId.W2:
        return 1.0
    return _x_coth_x(th1)


def bifurcation_rhs(alpha0: float, lam: float) -> float:
    """Right-hand side of the bifurcation relation, i.e. ``a**-2`` (W1-W3).

    Evaluated as ``K sin^2(lam) - theta0 sin(lam) cos(lam)`` so that the
    ``cot(lam)`` pole at multiples of pi never appears. W4 has no such
    relation; ``nan`` is returned there.
    """
    cls = classify_regime(alpha0)
    if cls == WaveClassId.W4:
        return math.nan
    th0, _ = thetas(alpha0)
    K = surface_coefficient(alpha0)
    s, c = math.sin(lam), math.cos(lam)
    if abs(s) <= _SIN_SNAP * max(1.0, abs(lam)):
        # lam is a multiple of pi up to rounding; the relation vanishes there
        s = 0.0
    if math.isinf(K):
        return K if s != 0.0 else -th0 * s * c
    return K * s * s - th0 * s * c


def _as_sign(sign) -> AmplitudeSign:
    if isinstance(sign, AmplitudeSign):
        return sign
    try:
        return AmplitudeSign(str(sign).lower())
    except ValueError:
        raise ValidationError(f"amplitude sign must be 'positive' or 'negative', got {sign!r}") from None


def bifurcation_amplitude(alpha0: float, lam: float, sign=AmplitudeSign.POSITIVE) -> float:
    """Background-current amplitude ``a`` fixed by the bifurcation relation.

    For W1-W3 only ``a**-2`` is determined, so ``sign`` picks the root. For W4
    the closed form ``(lam^2 theta1 coth(theta1) - 1) / (lam theta0)`` is used
    and ``sign`` is ignored.
    """
    cls = classify_regime(alpha0)
    lam = float(lam)
    if not math.isfinite(lam):
        raise ValidationError(f"lambda must be finite, got {lam!r}")
    th0, _ = thetas(alpha0)
    if cls == WaveClassId.W4:
        if lam == 0.0:
            raise LambdaZeroError("lambda zero: W4 amplitude undefined")
        return (lam * lam * surface_coefficient(alpha0) - 1.0) / (lam * th0)
    rhs = bifurcation_rhs(alpha0, lam)
    if not rhs > 0.0 or math.isinf(rhs):
        raise InfeasibleLambdaError(
            f"infeasible lambda {lam!r} for alpha0={alpha0!r}: bifurcation rhs = {rhs!r}"
        )
    a = rhs ** -0.5
    return -a if _as_sign(sign) is AmplitudeSign.NEGATIVE else a


def lambda_interval(alpha0: float) -> tuple[float, float] | None:
    """The open lambda interval stated alongside each class (None for W4)."""
    cls = classify_regime(alpha0)
    if cls == WaveClassId.W4:
        return None
    if cls == WaveClassId.W2:
        return (0.25 * math.pi, math.pi)
    th0, _ = thetas(alpha0)
    return (arccot(surface_coefficient(alpha0) / th0), math.pi)


def admissible_lambda(alpha0: float, lam: float) -> LambdaStatus:
    cls = classify_regime(alpha0)
    lam = float(lam)
    if cls == WaveClassId.W4:
        return LambdaStatus.PAPER_INTERVAL if lam != 0.0 else LambdaStatus.INFEASIBLE
    rhs = bifurcation_rhs(alpha0, lam)
    if not (rhs > 0.0) or math.isinf(rhs):
        return LambdaStatus.INFEASIBLE
    lo, hi = lambda_interval(alpha0)
    if lo < lam < hi:
        return LambdaStatus.PAPER_INTERVAL
    return LambdaStatus.POSITIVITY_ONLY


@dataclass(frozen=True)
class WaveParameters:
    """One linearized wave: (alpha0, lambda, epsilon) plus derived quantities.

    Build it with :meth:`create`; the amplitude then satisfies the
    bifurcation relation by construction.
    """

    alpha0: float
    lam: float
    epsilon: float
    theta0: float
    theta1: float
    amplitude: float
    class_id: WaveClassId
    amplitude_sign: AmplitudeSign = AmplitudeSign.POSITIVE

    @classmethod
    def create(cls, alpha0, lam, epsilon=0.0, sign=AmplitudeSign.POSITIVE) -> "WaveParameters":
        class_id = classify_regime(alpha0)
        epsilon = float(epsilon)
        if not (epsilon >= 0.0) or not math.isfinite(epsilon):
            raise ValidationError(f"epsilon must be a finite number >= 0, got {epsilon!r}")
        sign = _as_sign(sign)
        a = bifurcation_amplitude(alpha0, lam, sign)
        th0, th1 = thetas(alpha0)
        return cls(float(alpha0), float(lam), epsilon, th0, th1, a, class_id, sign)

    def with_epsilon(self, epsilon) -> "WaveParameters":
        return WaveParameters.create(self.alpha0, self.lam, epsilon, self.amplitude_sign)

    def with_lambda(self, lam) -> "WaveParameters":
        return WaveParameters.create(self.alpha0, lam, self.epsilon, self.amplitude_sign)

    @property
    def lambda_status(self) -> LambdaStatus:
        return admissible_lambda(self.alpha0, self.lam)

    @property
    def kernel_args(self) -> tuple:
        """(cls, th0, th1, a, lam, eps) in the layout the kernels expect."""
        return (int(self.class_id), self.theta0, self.theta1, self.amplitude, self.lam, self.epsilon)


@dataclass(frozen=True)
class VelocitySample:
    x: float
    y: float
    u: float
    v: float


def background_current(params: WaveParameters, y):
    return kernels.background_current(int(params.class_id), params.theta0, params.amplitude, params.lam, y)


def background_current_derivative(params: WaveParameters, y):
    return kernels.background_current_dy(int(params.class_id), params.theta0, params.amplitude, params.lam, y)


def velocity_field(params: WaveParameters, x, y):
    """(U, V) at (x, y). Scalars give a :class:`VelocitySample`; arrays a tuple."""
    u, v = kernels.velocity(*params.kernel_args, x, y)
    if np.ndim(u) == 0 and np.ndim(v) == 0:
        return VelocitySample(float(x), float(y), float(u), float(v))
    return u, v


def generator(params: WaveParameters, y):
    return kernels.generator(int(params.class_id), params.theta1, y)


def _generator_scalar(params: WaveParameters, y: float) -> float:
    return float(generator(params, y))


def sturm_residual(params: WaveParameters, y: float, h: float = 1e-4, method: str = "fd") -> float:
    """``-f'' + (alpha0 + 1) f`` for the class generator.

    Analytically zero. ``method="fd"`` takes f'' from a 5-point stencil and so
    measures how well the generator and the class data agree; ``"analytic"``
    uses the closed-form f'' (exactly 0 for W2).
    """
    if method == "analytic":
        d2 = float(kernels.generator_dyy(int(params.class_id), params.theta1, y))
        return -d2 + (params.alpha0 + 1.0) * _generator_scalar(params, y)
    if method != "fd":
        raise ValidationError(f"method must be 'fd' or 'analytic', got {method!r}")
    f = lambda t: _generator_scalar(params, t)  # noqa: E731
    d2 = (-f(y + 2 * h) + 16 * f(y + h) - 30 * f(y) + 16 * f(y - h) - f(y - 2 * h)) / (12 * h * h)
    return -d2 + (params.alpha0 + 1.0) * f(y)
