"""Rotating-frame Hamiltonian of the q0-q1-q2 chain and its closed-system evolution.

The total Hamiltonian is a static crosstalk term on the links (q0, q1) and
(q1, q2) plus sigma_x drives on the two adversarial qubits. The propagator over
t in [0, 1] is a time-ordered product of exact exponentials of the Hamiltonian
sampled at sub-interval midpoints, so it is unitary by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import ValidationError
from .pulse import PulseSpec, envelope
from .qcore import I2, PAULI, SX, check_density, kron, partial_trace_keep_last
from .tomo import QuantumChannel, reconstruct_channel

AUX_STATES = ("00", "01", "10", "11", "++")

DEFAULT_TIME_STEPS = 50
DEFAULT_SUBSTEPS = 20

_X0 = kron(SX, I2, I2)
_X1 = kron(I2, SX, I2)


def _pauli_pair(value) -> tuple[str, str]:
    pair = tuple(str(value).upper()) if isinstance(value, str) else tuple(str(v).upper() for v in value)
    if len(pair) != 2 or any(p not in ("X", "Y", "Z") for p in pair):
        raise ValidationError(f"coupling type must be two Pauli labels from X, Y, Z, got {value!r}")
    return pair


@dataclass(frozen=True)
class CouplingSpec:
    """Always-on crosstalk ``j01 * (a (x) b (x) I) + j12 * (I (x) a' (x) b')``."""

    pauli_01: tuple[str, str] = ("Z", "X")
    pauli_12: tuple[str, str] = ("Z", "X")
    j01: float = 0.5
    j12: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "pauli_01", _pauli_pair(self.pauli_01))
        object.__setattr__(self, "pauli_12", _pauli_pair(self.pauli_12))
        for name in ("j01", "j12"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValidationError(f"coupling {name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))

    @classmethod
    def uniform(cls, kind: str, j: float = 0.5) -> "CouplingSpec":
        """Same Pauli pair and strength on both links, e.g. ``uniform("YX")``."""
        return cls(kind, kind, j, j)

    @property
    def label(self) -> str:
        a, b = "".join(self.pauli_01), "".join(self.pauli_12)
        return a if a == b else f"{a}-{b}"


@dataclass(frozen=True)
class AttackConfig:
    coupling: CouplingSpec = field(default_factory=CouplingSpec)
    pulse_q0: PulseSpec = field(default_factory=PulseSpec)
    pulse_q1: PulseSpec = field(default_factory=PulseSpec)
    aux_state: str = "00"
    time_steps: int = DEFAULT_TIME_STEPS
    substeps_per_step: int = DEFAULT_SUBSTEPS

    def __post_init__(self):
        if self.aux_state not in AUX_STATES:
            raise ValidationError(f"aux_state must be one of {AUX_STATES}, got {self.aux_state!r}")
        for name in ("time_steps", "substeps_per_step"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValidationError(f"{name} must be an integer >= 1, got {value!r}")

    def with_(self, **changes) -> "AttackConfig":
        return replace(self, **changes)

    def with_amplitudes(self, a0: float | None = None, a1: float | None = None) -> "AttackConfig":
        p0 = self.pulse_q0 if a0 is None else self.pulse_q0.with_(amplitude=a0)
        p1 = self.pulse_q1 if a1 is None else self.pulse_q1.with_(amplitude=a1)
        return replace(self, pulse_q0=p0, pulse_q1=p1)


def aux_density(label: str) -> np.ndarray:
    """Initial 4x4 state of (q0, q1) for an aux label such as ``"01"`` or ``"++"``."""
    if label not in AUX_STATES:
        raise ValidationError(f"aux_state must be one of {AUX_STATES}, got {label!r}")
    one = {"0": np.array([1, 0]), "1": np.array([0, 1]), "+": np.array([1, 1]) / math.sqrt(2)}
    psi = np.kron(one[label[0]], one[label[1]]).astype(complex)
    return np.outer(psi, psi.conj())


def coupling_hamiltonian(c: CouplingSpec) -> np.ndarray:
    a, b = c.pauli_01
    p, q = c.pauli_12
    return c.j01 * kron(PAULI[a], PAULI[b], I2) + c.j12 * kron(I2, PAULI[p], PAULI[q])


def drive_hamiltonian(cfg: AttackConfig, t: float) -> np.ndarray:
    """sigma_x drives on q0 and q1 at time ``t``; q2 is never driven directly."""
    f0 = float(envelope(cfg.pulse_q0, t))
    f1 = float(envelope(cfg.pulse_q1, t))
    return f0 * _X0 + f1 * _X1


def hamiltonian(cfg: AttackConfig, t: float) -> np.ndarray:
    return coupling_hamiltonian(cfg.coupling) + drive_hamiltonian(cfg, t)


def propagator(cfg: AttackConfig) -> np.ndarray:
    """Time-ordered propagator over [0, 1] with the midpoint rule.

    The window is split into ``time_steps * substeps_per_step`` equal
    sub-intervals; on each the Hamiltonian is frozen at the midpoint and
    exponentiated exactly.
    """
    n = cfg.time_steps * cfg.substeps_per_step
    dt = 1.0 / n
    mids = (np.arange(n) + 0.5) * dt
    f0 = envelope(cfg.pulse_q0, mids)
    f1 = envelope(cfg.pulse_q1, mids)
    hs = coupling_hamiltonian(cfg.coupling)[None] + f0[:, None, None] * _X0 + f1[:, None, None] * _X1
    w, v = np.linalg.eigh(hs)
    steps = (v * np.exp(-1j * dt * w)[:, None, :]) @ np.conj(np.swapaxes(v, 1, 2))
    u = np.eye(8, dtype=complex)
    for step in steps:
        u = step @ u
    return u


def evolve(cfg: AttackConfig, rho0: np.ndarray) -> np.ndarray:
    """Final register state ``U rho0 U^dagger``."""
    rho0 = check_density(rho0, dim=8)
    u = propagator(cfg)
    return u @ rho0 @ u.conj().T


def victim_map(u: np.ndarray, aux: np.ndarray | str = "00") -> Callable[[np.ndarray], np.ndarray]:
    """The map ``rho_v -> Tr_{q0,q1}[U (aux (x) rho_v) U^dagger]`` for a fixed register unitary."""
    tau = aux_density(aux) if isinstance(aux, str) else np.asarray(aux, dtype=complex)
    u = np.asarray(u, dtype=complex)
    ud = u.conj().T

    def apply(rho: np.ndarray) -> np.ndarray:
        return partial_trace_keep_last(u @ np.kron(tau, rho) @ ud)

    return apply


def victim_channel(cfg: AttackConfig) -> QuantumChannel:
    """Channel induced on q2 by the attack window, reconstructed from four probe states."""
    return reconstruct_channel(victim_map(propagator(cfg), cfg.aux_state))
