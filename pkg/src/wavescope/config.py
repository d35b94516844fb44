"""Flat key-value run configurations.

One or more ``key=value`` pairs per line, separated by whitespace; ``#``
starts a comment. Example::

    alpha0=-20 lambda=4.39 epsilon=0.05
    grid=800x400 outputs=svg,json
    lambda=sweep(4.30,4.60,31)   # later keys win
"""

from __future__ import annotations

import math
import re
import shlex
from dataclasses import dataclass, replace

from .errors import ConfigError, ValidationError
from .wave_model import AmplitudeSign, classify_regime

__all__ = ["Sweep", "RunConfig", "parse_config", "ALLOWED_OUTPUTS", "parse_outputs"]

ALLOWED_OUTPUTS = ("svg", "csv", "json")
_SWEEP = re.compile(r"^sweep\(\s*([^,]+)\s*,\s*([^,]+)\s*,\s*([^,)]+)\s*\)$")
_GRID = re.compile(r"^(\d+)[xX](\d+)$")


@dataclass(frozen=True)
class Sweep:
    lo: float
    hi: float
    steps: int

    def values(self) -> list[float]:
        if self.steps == 1:
            return [self.lo]
        return [self.lo + (self.hi - self.lo) * i / (self.steps - 1) for i in range(self.steps)]


@dataclass(frozen=True)
class RunConfig:
    alpha0: float
    lam: float | Sweep
    epsilon: float = 0.0
    grid: tuple = (800, 400)
    outputs: tuple = ("svg", "csv", "json")
    out_dir: str = "out"
    streamline_levels: int = 24
    seed_overrides: tuple = ()
    sign: str = "positive"
    heatmap: bool = False

    @property
    def is_sweep(self) -> bool:
        return isinstance(self.lam, Sweep)

    def echo(self) -> dict:
        lam = self.lam
        if isinstance(lam, Sweep):
            lam = {"sweep": [lam.lo, lam.hi, lam.steps]}
        return {
            "alpha0": self.alpha0,
            "lambda": lam,
            "epsilon": self.epsilon,
            "grid": list(self.grid),
            "outputs": list(self.outputs),
            "streamline_levels": self.streamline_levels,
            "seeds": [list(s) for s in self.seed_overrides],
            "sign": self.sign,
            "heatmap": self.heatmap,
        }

    def override(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        cfg = replace(self, **kw)
        validate(cfg)
        return cfg


def _real(text, key, line):
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}", line) from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite", line)
    return v


def _int(text, key, line):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}", line) from None


def _bool(text, key, line):
    t = text.lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}", line)


def _lambda(text, line):
    m = _SWEEP.match(text)
    if m:
        lo, hi = _real(m.group(1), "lambda", line), _real(m.group(2), "lambda", line)
        steps = _int(m.group(3).strip(), "lambda", line)
        if steps < 2:
            raise ConfigError("lambda: sweep needs steps >= 2", line)
        return Sweep(lo, hi, steps)
    return _real(text, "lambda", line)


def _seeds(text, line):
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.strip("()").split(",")
        if len(parts) != 2:
            raise ConfigError(f"seeds: expected 'x,y' pairs separated by ';', got {chunk!r}", line)
        out.append((_real(parts[0], "seeds", line), _real(parts[1], "seeds", line)))
    return tuple(out)


def parse_outputs(text, line):
    outs = tuple(o.strip().lower() for o in text.split(",") if o.strip())
    bad = [o for o in outs if o not in ALLOWED_OUTPUTS]
    if bad:
        raise ConfigError(f"outputs: unknown format(s) {', '.join(bad)}", line)
    # canonical order, no duplicates
    return tuple(o for o in ALLOWED_OUTPUTS if o in outs)


def _grid(text, line):
    m = _GRID.match(text)
    if not m:
        raise ConfigError(f"grid: expected NXxNY, got {text!r}", line)
    return (int(m.group(1)), int(m.group(2)))


_PARSERS = {
    "alpha0": lambda t, ln: _real(t, "alpha0", ln),
    "lambda": _lambda,
    "epsilon": lambda t, ln: _real(t, "epsilon", ln),
    "grid": _grid,
    "outputs": parse_outputs,
    "out_dir": lambda t, ln: t,
    "streamline_levels": lambda t, ln: _int(t, "streamline_levels", ln),
    "seeds": _seeds,
    "sign": lambda t, ln: t.lower(),
    "heatmap": lambda t, ln: _bool(t, "heatmap", ln),
}
_FIELD = {"lambda": "lam", "seeds": "seed_overrides"}


def validate(cfg: RunConfig, lines: dict | None = None) -> None:
    lines = lines or {}
    try:
        classify_regime(cfg.alpha0)
    except ValidationError as exc:
        raise ConfigError(str(exc), lines.get("alpha0")) from None
    if not cfg.epsilon >= 0.0:
        raise ConfigError(f"epsilon must be >= 0, got {cfg.epsilon!r}", lines.get("epsilon"))
    nx, ny = cfg.grid
    if nx < 16 or ny < 16:
        raise ConfigError(f"grid must be at least 16x16, got {nx}x{ny}", lines.get("grid"))
    if not cfg.outputs:
        raise ConfigError("outputs must not be empty", lines.get("outputs"))
    if cfg.streamline_levels < 0:
        raise ConfigError("streamline_levels must be >= 0", lines.get("streamline_levels"))
    if cfg.sign not in (s.value for s in AmplitudeSign):
        raise ConfigError(f"sign must be 'positive' or 'negative', got {cfg.sign!r}", lines.get("sign"))


def parse_config(text: str) -> RunConfig:
    """Parse a configuration document; unknown keys and bad values raise ConfigError."""
    values: dict = {}
    where: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        try:
            tokens = shlex.split(raw, comments=True)
        except ValueError as exc:
            raise ConfigError(str(exc), lineno) from None
        for tok in tokens:
            if "=" not in tok:
                raise ConfigError(f"expected key=value, got {tok!r}", lineno)
            key, val = (s.strip() for s in tok.split("=", 1))
            if key not in _PARSERS:
                raise ConfigError(f"unknown key {key!r}", lineno)
            values[_FIELD.get(key, key)] = _PARSERS[key](val, lineno)
            where[key] = lineno
    for req in ("alpha0", "lam"):
        if req not in values:
            name = "lambda" if req == "lam" else req
            raise ConfigError(f"missing required key {name!r}")
    cfg = RunConfig(**values)
    validate(cfg, where)
    return cfg
