"""Attack campaigns: coupling/pulse influence scan, amplitude sweeps, detuning robustness."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dynamics import AttackConfig, CouplingSpec, propagator, victim_channel
from .errors import ValidationError
from .fit import fit_channel
from .pulse import PulseShape
from .qcore import partial_trace_keep_last
from .tomo import channel_kraus

SCAN_COUPLINGS = ("YX", "ZX")
SCAN_SHAPES = ("chirp", "cosine", "square", "drag", "gaussian")
AMPLITUDE_GRID = tuple(round(0.1 * k, 10) for k in range(1, 11))
DETUNING_POINTS = 21
DETUNING_MAX = 4 * math.pi


def detuning_grid(n: int = DETUNING_POINTS, stop: float = DETUNING_MAX) -> np.ndarray:
    return np.linspace(0.0, stop, n)


class SweepTarget(str, enum.Enum):
    CATALYST_Q0 = "catalyst_q0"
    DRIVER_Q1 = "driver_q1"

    @classmethod
    def parse(cls, value) -> "SweepTarget":
        if isinstance(value, cls):
            return value
        key = str(value).lower()
        aliases = {"catalyst": "catalyst_q0", "q0": "catalyst_q0", "driver": "driver_q1", "q1": "driver_q1"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValidationError(f"unknown sweep target {value!r} (expected catalyst_q0 or driver_q1)") from None


@dataclass(frozen=True)
class SweepRecord:
    """One point of a scan or sweep.

    ``accuracy`` is only filled by protocol-level grids; ``converged`` is False
    when the fit at this point hit its round limit.
    """

    config_id: str
    swept_name: str
    swept_value: float
    influence_norm: float | None = None
    theta: float | None = None
    loss: float | None = None
    converged: bool = True
    accuracy: float | None = None

    def __post_init__(self):
        has_fit = self.theta is not None and self.loss is not None
        if self.influence_norm is None and not has_fit and self.accuracy is None:
            raise ValidationError("a sweep record needs an influence norm, a (theta, loss) pair or an accuracy")
        if self.influence_norm is not None and self.influence_norm < 0:
            raise ValidationError(f"influence norm must be >= 0, got {self.influence_norm}")


def check_ascending(records: Sequence[SweepRecord]) -> None:
    values = [r.swept_value for r in records]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValidationError("sweep values must be strictly increasing")


# -- influence scan ------------------------------------------------------------


def victim_populations(cfg: AttackConfig) -> np.ndarray:
    """Computational-basis distribution of q2 after the window, starting from |000>."""
    u = propagator(cfg)
    psi = u[:, 0]
    rho = partial_trace_keep_last(np.outer(psi, psi.conj()))
    return np.clip(np.real(np.diag(rho)), 0.0, 1.0)


def influence_norm(cfg: AttackConfig) -> float:
    """``||p - p_ref||_2`` with ``p_ref`` from the same config with q0 undriven."""
    if cfg.pulse_q0.amplitude == 0.0:
        return 0.0
    p = victim_populations(cfg)
    p_ref = victim_populations(cfg.with_amplitudes(a0=0.0))
    return float(np.linalg.norm(p - p_ref))


def scan_config(base: AttackConfig, coupling: str, shape) -> AttackConfig:
    """``base`` with both links set to ``coupling`` and the q0 pulse set to ``shape``."""
    c = base.coupling
    return base.with_(
        coupling=CouplingSpec(coupling, coupling, c.j01, c.j12),
        pulse_q0=base.pulse_q0.with_(shape=PulseShape.parse(shape)),
    )


def coupling_scan(couplings: Iterable[str], shapes: Iterable, base: AttackConfig | None = None) -> list[SweepRecord]:
    """Influence norm for every (coupling, q0 shape) pair, strongest first.

    Ties are broken by the (coupling, shape) labels. Records carry the rank
    (1 = strongest) as their swept value and ``"COUPLING/shape"`` as id.
    """
    base = base or AttackConfig()
    couplings = [CouplingSpec(c, c).label for c in couplings]
    shapes = [PulseShape.parse(s).value for s in shapes]
    if not couplings or not shapes:
        raise ValidationError("coupling scan needs at least one coupling and one shape")
    rows = []
    for coupling in couplings:
        for shape in shapes:
            rows.append((influence_norm(scan_config(base, coupling, shape)), coupling, shape))
    rows.sort(key=lambda r: (-r[0], r[1], r[2]))
    return [
        SweepRecord(config_id=f"{c}/{s}", swept_name="rank", swept_value=float(k), influence_norm=v)
        for k, (v, c, s) in enumerate(rows, start=1)
    ]


# -- amplitude and detuning sweeps ----------------------------------------------


def fit_config(cfg: AttackConfig):
    """Simulate, reconstruct and fit one configuration."""
    return fit_channel(channel_kraus(victim_channel(cfg)))


def amplitude_sweep(target, values: Sequence[float], base: AttackConfig | None = None) -> list[SweepRecord]:
    """Fitted (theta, loss) as one adversarial drive amplitude is varied."""
    target = SweepTarget.parse(target)
    base = base or AttackConfig()
    values = [float(v) for v in values]
    if not values:
        raise ValidationError("amplitude sweep needs at least one value")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValidationError("sweep amplitudes must be strictly increasing")
    records = []
    for a in values:
        cfg = base.with_amplitudes(a0=a) if target is SweepTarget.CATALYST_Q0 else base.with_amplitudes(a1=a)
        res = fit_config(cfg)
        records.append(
            SweepRecord(
                config_id=f"{base.coupling.label}/{target.value}",
                swept_name=target.value,
                swept_value=a,
                theta=res.theta,
                loss=res.loss,
                converged=res.converged,
            )
        )
    return records


def detuning_config(base: AttackConfig, shape, delta: float) -> AttackConfig:
    shape = PulseShape.parse(shape)
    return base.with_(
        pulse_q0=base.pulse_q0.with_(shape=shape, detuning=float(delta)),
        pulse_q1=base.pulse_q1.with_(shape=shape, detuning=float(delta)),
    )


def detuning_sweep(shape, deltas: Sequence[float], base: AttackConfig | None = None) -> list[SweepRecord]:
    """Fit results with ``shape`` and detuning ``delta`` applied to both pulses."""
    base = base or AttackConfig()
    shape = PulseShape.parse(shape)
    deltas = [float(d) for d in deltas]
    if any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise ValidationError("detuning values must be strictly increasing")
    records = []
    for d in deltas:
        res = fit_config(detuning_config(base, shape, d))
        records.append(
            SweepRecord(
                config_id=f"{base.coupling.label}/{shape.value}",
                swept_name="detuning",
                swept_value=d,
                theta=res.theta,
                loss=res.loss,
                converged=res.converged,
            )
        )
    return records


def detuning_variance(shape, deltas: Sequence[float], base: AttackConfig | None = None) -> tuple[float, float]:
    """Population variance of the fitted theta and loss over a detuning grid."""
    base = base or AttackConfig()
    if len(deltas) < 2:
        raise ValidationError("detuning variance needs at least two detuning values")
    thetas, losses = [], []
    for d in deltas:
        res = fit_config(detuning_config(base, shape, d))
        thetas.append(res.theta)
        losses.append(res.loss)
    return float(np.var(thetas)), float(np.var(losses))


def value_range(records: Sequence[SweepRecord], field: str = "theta") -> float:
    vals = [getattr(r, field) for r in records]
    return float(max(vals) - min(vals))
