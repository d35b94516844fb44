"""Critical layers and phase portraits of linearized steady water waves with affine vorticity.

Set ``WAVESCOPE_DISABLE_NUMBA=1`` before import to run the pure-numpy kernels.
"""

from ._accel import backend_name
from .errors import NumericalError, ValidationError, WavescopeError
from .portrait import (
    HamiltonianField,
    build_portrait,
    decompose_layers,
    find_critical_points,
    integrate_streamline,
    sweep_merge_tracking,
    trace_infinity_isocline,
)
from .stagnation import feasible_region_sample, stagnation_levels
from .wave_model import WaveClassId, WaveParameters, bifurcation_amplitude, classify_regime, velocity_field

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "WavescopeError",
    "ValidationError",
    "NumericalError",
    "WaveClassId",
    "WaveParameters",
    "classify_regime",
    "bifurcation_amplitude",
    "velocity_field",
    "stagnation_levels",
    "feasible_region_sample",
    "HamiltonianField",
    "find_critical_points",
    "trace_infinity_isocline",
    "decompose_layers",
    "integrate_streamline",
    "sweep_merge_tracking",
    "build_portrait",
]
