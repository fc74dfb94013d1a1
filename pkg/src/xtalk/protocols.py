"""Victim protocols on q2 and the attacker-first / victim-first composition.

The victim's gates are ideal and instantaneous. The attack is a separate
channel acting either before the victim's unitary (attacker first) or after it
(victim first), always just before measurement in the latter case.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import TrainingError, ValidationError
from .qcore import SX, SY, SZ, is_unitary
from .tomo import QuantumChannel

KET0 = np.array([[1, 0], [0, 0]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)

DEFAULT_DEGREE = 2
DEFAULT_EPSILON = 1e-16
DEFAULT_TRAIN_FRACTION = 0.7
DEFAULT_SPLIT_SEED = 42


class ScenarioTiming(str, enum.Enum):
    ATTACKER_FIRST = "attacker-first"
    VICTIM_FIRST = "victim-first"
    NO_ATTACK = "no-attack"

    @classmethod
    def parse(cls, value: "str | ScenarioTiming") -> "ScenarioTiming":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("_", "-")
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(t.value for t in cls)
            raise ValidationError(f"unknown timing {value!r} (expected one of {names})") from None


def rz(phi: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])


def rx(phi: float) -> np.ndarray:
    return math.cos(phi / 2) * np.eye(2) - 1j * math.sin(phi / 2) * SX


def ry_half(beta: float) -> np.ndarray:
    """``exp(-i beta Y / 2)``."""
    return math.cos(beta / 2) * np.eye(2) - 1j * math.sin(beta / 2) * SY


def coin_unitary(lam: float) -> np.ndarray:
    """``exp(-i lam Y) = [[cos, -sin], [sin, cos]]`` (full angle)."""
    c, s = math.cos(lam), math.sin(lam)
    return np.array([[c, -s], [s, c]], dtype=complex)


def compose_scenario(timing, victim_unitary: np.ndarray, channel: QuantumChannel | None = None) -> np.ndarray:
    """Final victim state for ``V`` applied to |0> with the attack placed per ``timing``."""
    timing = ScenarioTiming.parse(timing)
    v = np.asarray(victim_unitary, dtype=complex)
    if v.shape != (2, 2) or not is_unitary(v, 1e-10):
        raise ValidationError("victim unitary must be a 2x2 unitary")
    return _compose(timing, v, channel)


def _compose(timing: ScenarioTiming, v: np.ndarray, channel, norm: float = 1.0) -> np.ndarray:
    # ``v`` may be a unitary scaled by sqrt(norm); the division is applied once at the end.
    vd = v.conj().T
    if timing is ScenarioTiming.NO_ATTACK:
        return v @ KET0 @ vd / norm
    if channel is None:
        raise ValidationError(f"{timing.value} scenario needs an attack channel")
    if timing is ScenarioTiming.ATTACKER_FIRST:
        return v @ channel(KET0) @ vd / norm
    return channel(v @ KET0 @ vd / norm)


def coin_flip_p1(lam: float, timing=ScenarioTiming.NO_ATTACK, channel: QuantumChannel | None = None) -> float:
    """Probability of reading 1 from the biased coin ``cos(lam)|0> + sin(lam)|1>``."""
    rho = compose_scenario(timing, coin_unitary(lam), channel)
    return float(rho[1, 1].real)


def coin_deviation(lams: Sequence[float], timing, channel: QuantumChannel | None) -> float:
    """Largest ``|P(1) - sin^2 lam|`` over a grid of coin angles."""
    return max(abs(coin_flip_p1(lam, timing, channel) - math.sin(lam) ** 2) for lam in lams)


def _xor_scaled(x1: int, x2: int) -> np.ndarray:
    """``2 sqrt(2)`` times the XOR circuit unitary, with Gaussian-integer entries.

    Each of H, R_Z(+-pi/2) and R_X(+-pi/2) is a Gaussian-integer matrix over
    sqrt(2); keeping that factor out makes the ideal truth table exact in
    floating point.
    """
    if x1 not in (0, 1) or x2 not in (0, 1):
        raise ValidationError(f"XOR inputs must be bits, got ({x1!r}, {x2!r})")
    sz = 2 * x1 - 1
    sx = 2 * x2 - 1
    h = np.array([[1, 1], [1, -1]], dtype=complex)
    z = np.diag([1 - 1j * sz, 1 + 1j * sz])
    x = np.array([[1, -1j * sx], [-1j * sx, 1]])
    return x @ z @ h


def xor_unitary(x1: int, x2: int) -> np.ndarray:
    """``R_X((2 x2 - 1) pi/2) R_Z((2 x1 - 1) pi/2) H``."""
    return _xor_scaled(x1, x2) / (2 * math.sqrt(2))


def xor_probs(x1: int, x2: int, timing=ScenarioTiming.NO_ATTACK, channel: QuantumChannel | None = None) -> tuple[float, float]:
    """Outcome distribution of the single-qubit XOR circuit H, R_Z, R_X."""
    rho = _compose(ScenarioTiming.parse(timing), _xor_scaled(x1, x2), channel, norm=8.0)
    p0, p1 = float(rho[0, 0].real), float(rho[1, 1].real)
    return p0, p1


def xor_delta_max(timing, channel: QuantumChannel | None) -> float:
    """Worst-case distance from a deterministic outcome over the four input pairs."""
    worst = min(max(xor_probs(x1, x2, timing, channel)) for x1 in (0, 1) for x2 in (0, 1))
    return abs(1.0 - worst)


# -- single-qubit quantum neural network -------------------------------------


@dataclass(frozen=True, eq=False)
class SqqnnModel:
    coefficients: np.ndarray
    degree: int
    epsilon: float = DEFAULT_EPSILON
    feature_count: int = 4

    def __post_init__(self):
        s = np.asarray(self.coefficients, dtype=float)
        if s.shape != (1 + self.degree * self.feature_count,):
            raise ValidationError(
                f"expected {1 + self.degree * self.feature_count} coefficients, got shape {s.shape}"
            )
        if not 0 < self.epsilon <= 1e-8:
            raise ValidationError(f"epsilon must lie in (0, 1e-8], got {self.epsilon}")
        s.flags.writeable = False
        object.__setattr__(self, "coefficients", s)


def poly_features(features: np.ndarray, degree: int) -> np.ndarray:
    """Design matrix ``[1, x_1..x_p, x_1^2..x_p^2, ..., x_1^K..x_p^K]``."""
    x = np.atleast_2d(np.asarray(features, dtype=float))
    return np.hstack([np.ones((x.shape[0], 1))] + [x**k for k in range(1, degree + 1)])


def _check_labels(labels) -> np.ndarray:
    y = np.asarray(labels)
    if y.ndim != 1 or not np.all(np.isin(y, (-1, 1))):
        raise ValidationError("labels must be a vector of -1/+1 values")
    return y.astype(int)


def sqqnn_train(features, labels, degree: int = DEFAULT_DEGREE, epsilon: float = DEFAULT_EPSILON) -> SqqnnModel:
    """Closed-form least-squares fit of the polynomial feature weights.

    Targets are ``arctanh(y (1 - epsilon))``; a rank-deficient design gets the
    minimum-norm solution.
    """
    x = np.atleast_2d(np.asarray(features, dtype=float))
    y = _check_labels(labels)
    if x.shape[0] != y.shape[0]:
        raise ValidationError(f"{x.shape[0]} samples but {y.shape[0]} labels")
    if isinstance(degree, bool) or not isinstance(degree, int) or degree < 1:
        raise ValidationError(f"degree must be a positive integer, got {degree!r}")
    for cls in (-1, 1):
        if not np.any(y == cls):
            raise TrainingError(f"no training samples with label {cls:+d}")
    if not 0 < epsilon <= 1e-8:
        raise ValidationError(f"epsilon must lie in (0, 1e-8], got {epsilon}")
    targets = np.arctanh(y * (1 - epsilon))
    s, *_ = np.linalg.lstsq(poly_features(x, degree), targets, rcond=None)
    return SqqnnModel(s, degree, epsilon, x.shape[1])


def sqqnn_angles(model: SqqnnModel, features) -> np.ndarray:
    """Rotation angles ``beta = arccos(tanh(S . x_poly))``."""
    x = np.atleast_2d(np.asarray(features, dtype=float))
    if x.shape[1] != model.feature_count:
        raise ValidationError(f"model expects {model.feature_count} features, got {x.shape[1]}")
    return np.arccos(np.tanh(poly_features(x, model.degree) @ model.coefficients))


def sqqnn_predict(model: SqqnnModel, features, timing=ScenarioTiming.NO_ATTACK, channel=None) -> np.ndarray:
    preds = []
    for beta in sqqnn_angles(model, features):
        rho = compose_scenario(timing, ry_half(beta), channel)
        ez = float(np.trace(SZ @ rho).real)
        preds.append(1 if ez >= 0 else -1)
    return np.array(preds, dtype=int)


def sqqnn_accuracy(model: SqqnnModel, features, labels, timing=ScenarioTiming.NO_ATTACK, channel=None) -> float:
    """Fraction of samples whose sign of <Z> matches the label (sign(0) is +1)."""
    y = _check_labels(labels)
    return float(np.mean(sqqnn_predict(model, features, timing, channel) == y))


def train_test_split(n: int, train_fraction: float = DEFAULT_TRAIN_FRACTION, seed: int = DEFAULT_SPLIT_SEED):
    """Index arrays for a seeded random split of ``n`` samples."""
    if not 0 < train_fraction < 1:
        raise ValidationError(f"train fraction must lie in (0, 1), got {train_fraction}")
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(round(train_fraction * n))
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])
