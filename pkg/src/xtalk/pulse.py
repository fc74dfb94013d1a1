"""Adversarial drive envelopes on the normalized window t in [0, 1]."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import RangeError, ValidationError

A_MAX = 1.0

DEFAULT_DETUNING = 5.0
DEFAULT_CHIRP_RATE = 10.0
DEFAULT_DRAG_ALPHA = 0.5
DEFAULT_SIGMA = 0.15

SQUARE_ON = 0.3
SQUARE_OFF = 0.7


class PulseShape(str, enum.Enum):
    COSINE = "cosine"
    GAUSSIAN = "gaussian"
    SQUARE = "square"
    CHIRP = "chirp"
    DRAG = "drag"

    @classmethod
    def parse(cls, value: "str | PulseShape") -> "PulseShape":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise ValidationError(f"unknown pulse shape {value!r} (expected one of {names})") from None


@dataclass(frozen=True)
class PulseSpec:
    """Drive pulse on one adversarial qubit.

    ``amplitude``, ``detuning`` and ``chirp_rate`` are angular frequencies in
    units where the pulse window has length 1; ``drag_alpha`` is dimensionless
    and ``sigma`` is a width on the same normalized time axis.
    """

    shape: PulseShape = PulseShape.COSINE
    amplitude: float = 0.5
    detuning: float = DEFAULT_DETUNING
    chirp_rate: float = DEFAULT_CHIRP_RATE
    drag_alpha: float = DEFAULT_DRAG_ALPHA
    sigma: float = DEFAULT_SIGMA
    amplitude_max: float = A_MAX

    def __post_init__(self):
        object.__setattr__(self, "shape", PulseShape.parse(self.shape))
        for name in ("amplitude", "detuning", "chirp_rate", "drag_alpha", "sigma", "amplitude_max"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValidationError(f"pulse {name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not 0.0 <= self.amplitude <= self.amplitude_max:
            raise ValidationError(
                f"pulse amplitude {self.amplitude} outside [0, {self.amplitude_max}]"
            )
        if self.shape in (PulseShape.GAUSSIAN, PulseShape.DRAG) and self.sigma <= 0:
            raise ValidationError(f"{self.shape.value} pulse requires sigma > 0, got {self.sigma}")

    def with_(self, **changes) -> "PulseSpec":
        return replace(self, **changes)


def envelope(spec: PulseSpec, t) -> np.ndarray:
    """Vectorized envelope ``f(t)``; no range check on ``t``."""
    t = np.asarray(t, dtype=float)
    a = spec.amplitude
    shape = spec.shape
    if shape is PulseShape.COSINE:
        return a * np.cos(spec.detuning * t)
    if shape is PulseShape.CHIRP:
        return a * np.cos((spec.detuning + spec.chirp_rate * t) * t)
    if shape is PulseShape.SQUARE:
        return np.where((t >= SQUARE_ON) & (t <= SQUARE_OFF), a, 0.0)
    u = t - 0.5
    gauss = np.exp(-(u**2) / (2 * spec.sigma**2))
    if shape is PulseShape.GAUSSIAN:
        return a * gauss
    # DRAG: Gaussian plus the scaled derivative correction.
    return a * (gauss - spec.drag_alpha * u / spec.sigma**2 * gauss)


def eval_pulse(spec: PulseSpec, t: float) -> float:
    """Envelope value ``f(t)`` for ``0 <= t <= 1``.

    The square pulse is on over the closed interval [0.3, 0.7].
    """
    if not 0.0 <= t <= 1.0:
        raise RangeError(f"pulse time {t} outside [0, 1]")
    return float(envelope(spec, t))
