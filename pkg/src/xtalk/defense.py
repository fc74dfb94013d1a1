"""Canary-circuit anomaly detection and reset-based containment."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ValidationError
from .protocols import (
    ScenarioTiming,
    SqqnnModel,
    coin_deviation,
    coin_flip_p1,
    sqqnn_accuracy,
)
from .tomo import QuantumChannel

CANARY_LAMBDA = math.pi / 4
DEFAULT_SHOTS = 10_000
DEFAULT_THRESHOLD = 5.0
DEFAULT_BASELINE = 0.5
MIN_SHOTS = 100
GENERATOR = "numpy.random.Generator(Philox)"

# Coin deviation is measured on 0, 5, ..., 90 degrees.
COIN_GRID = tuple(math.radians(d) for d in range(0, 91, 5))


def shot_rng(seed: int) -> np.random.Generator:
    """Counter-based, platform-independent stream for shot sampling."""
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class DetectionReport:
    p_hat: float
    baseline: float
    n_shots: int
    z_score: float
    flagged: bool
    seed: int
    threshold: float
    p_exact: float = field(default=float("nan"), compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["generator"] = GENERATOR
        d["numpy_version"] = np.__version__
        return d


def z_score(p_hat: float, baseline: float, n_shots: int) -> float:
    return abs(p_hat - baseline) / math.sqrt(baseline * (1 - baseline) / n_shots)


def canary_check(
    n_shots: int = DEFAULT_SHOTS,
    seed: int = 0,
    threshold: float = DEFAULT_THRESHOLD,
    channel: QuantumChannel | None = None,
    timing=ScenarioTiming.NO_ATTACK,
    baseline: float = DEFAULT_BASELINE,
) -> DetectionReport:
    """Run the fair-coin canary for ``n_shots`` sampled shots and z-test the result."""
    if isinstance(n_shots, bool) or not isinstance(n_shots, int) or n_shots < MIN_SHOTS:
        raise ValidationError(f"canary needs an integer n_shots >= {MIN_SHOTS}, got {n_shots!r}")
    if not threshold > 0:
        raise ValidationError(f"threshold must be > 0, got {threshold}")
    if not 0 < baseline < 1:
        raise ValidationError(f"baseline must lie in (0, 1), got {baseline}")
    timing = ScenarioTiming.parse(timing)
    if channel is None:
        timing = ScenarioTiming.NO_ATTACK
    p1 = min(max(coin_flip_p1(CANARY_LAMBDA, timing, channel), 0.0), 1.0)
    ones = int(np.count_nonzero(shot_rng(seed).random(n_shots) < p1))
    p_hat = ones / n_shots
    z = z_score(p_hat, baseline, n_shots)
    return DetectionReport(
        p_hat=p_hat,
        baseline=baseline,
        n_shots=n_shots,
        z_score=z,
        flagged=bool(z > threshold),
        seed=seed,
        threshold=threshold,
        p_exact=p1,
    )


class Protocol(str, enum.Enum):
    COIN = "coin"
    SQQNN = "sqqnn"

    @classmethod
    def parse(cls, value) -> "Protocol":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(f"unknown protocol {value!r} (expected coin or sqqnn)") from None


@dataclass(frozen=True)
class ContainmentReport:
    protocol: str
    attacker_first_impact: float
    post_reset_impact: float

    def to_dict(self) -> dict:
        return asdict(self)


def containment_compare(
    channel: QuantumChannel,
    protocol="coin",
    *,
    lambdas=COIN_GRID,
    model: SqqnnModel | None = None,
    features=None,
    labels=None,
) -> ContainmentReport:
    """Protocol damage with the attack unmitigated versus after an ideal reset.

    An ideal reset returns q2 to |0><0| after the attack window, so the
    protocol then starts clean and a later attack can only land after the
    victim gate; the post-reset impact is therefore the victim-first impact.

    Coin impact is the largest ``|P(1) - sin^2 lam|`` over ``lambdas``. SQQNN
    impact is the accuracy drop against the unattacked classifier and needs
    ``model``, ``features`` and ``labels``.
    """
    protocol = Protocol.parse(protocol)
    af, vf = ScenarioTiming.ATTACKER_FIRST, ScenarioTiming.VICTIM_FIRST
    if protocol is Protocol.COIN:
        return ContainmentReport(
            protocol.value,
            coin_deviation(lambdas, af, channel),
            coin_deviation(lambdas, vf, channel),
        )
    if model is None or features is None or labels is None:
        raise ValidationError("SQQNN containment needs a trained model with features and labels")
    clean = sqqnn_accuracy(model, features, labels)
    return ContainmentReport(
        protocol.value,
        max(0.0, clean - sqqnn_accuracy(model, features, labels, af, channel)),
        max(0.0, clean - sqqnn_accuracy(model, features, labels, vf, channel)),
    )
