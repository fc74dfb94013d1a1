"""Single-qubit process tomography: Choi matrix, chi matrix and Kraus operators.

Conventions
-----------
The Choi matrix is stored in the input (x) output ordering,
``C = sum_mn |m><n| (x) E(|m><n|)``, so ``C[2m + a, 2n + b] = E(|m><n|)[a, b]``.
Trace preservation reads ``Tr_out C = I``. The chi matrix is expressed in the
Pauli basis {I, X, Y, Z} with ``E(rho) = sum_mn chi_mn P_m rho P_n^dagger`` and
has unit trace.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, NonPhysicalChannelError, ReconstructionError, ValidationError
from .qcore import PAULI_BASIS, projector

CHANNEL_TOL = 1e-9
CLIP_TOL = 1e-9
TP_TOL = 1e-6
KRAUS_CUTOFF = 1e-10
NEG_EIG_TOL = 1e-6
N_KRAUS = 4

# Column m is the Choi vector (I (x) P_m)|Omega> of the Pauli basis element P_m.
_PAULI_CHOI_VECS = np.stack([p.T.reshape(4) for p in PAULI_BASIS], axis=1)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def _choi_apply(choi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    blocks = choi.reshape(2, 2, 2, 2)  # [m, a, n, b]
    return np.einsum("mn,manb->ab", rho, blocks)


def _output_trace(choi: np.ndarray) -> np.ndarray:
    """Partial trace of the Choi matrix over the output factor."""
    return np.einsum("mana->mn", choi.reshape(2, 2, 2, 2))


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """A CPTP qubit channel held by its Choi matrix.

    ``clip`` records the largest negative eigenvalue magnitude removed when the
    matrix was made physical; it is zero for channels built exactly.
    """

    choi: np.ndarray
    clip: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.choi, dtype=complex)
        if c.shape != (4, 4):
            raise DimensionError(f"Choi matrix must be 4x4, got {c.shape}")
        if not np.allclose(c, c.conj().T, rtol=0, atol=CHANNEL_TOL):
            raise ValidationError("Choi matrix is not Hermitian")
        lo = np.linalg.eigvalsh(c).min()
        if lo < -CHANNEL_TOL:
            raise ValidationError(f"Choi matrix has negative eigenvalue {lo:.3e}")
        dev = np.abs(_output_trace(c) - np.eye(2)).max()
        if dev > CHANNEL_TOL:
            raise ValidationError(f"channel is not trace preserving (deviation {dev:.3e})")
        object.__setattr__(self, "choi", _frozen(c))

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return self.apply(rho)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return _choi_apply(self.choi, np.asarray(rho, dtype=complex))

    @classmethod
    def identity(cls) -> "QuantumChannel":
        return cls.from_unitary(np.eye(2))

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "QuantumChannel":
        return cls.from_kraus([u])

    @classmethod
    def from_kraus(cls, ops: Sequence[np.ndarray]) -> "QuantumChannel":
        return cls(choi_from_kraus(ops))


@dataclass(frozen=True, eq=False)
class ChiMatrix:
    """Process matrix in the Pauli basis {I, X, Y, Z}."""

    chi: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.chi, dtype=complex)
        if x.shape != (4, 4):
            raise DimensionError(f"chi matrix must be 4x4, got {x.shape}")
        if not np.allclose(x, x.conj().T, rtol=0, atol=CHANNEL_TOL):
            raise ValidationError("chi matrix is not Hermitian")
        if abs(np.trace(x) - 1) > CHANNEL_TOL:
            raise ValidationError(f"chi matrix has trace {np.trace(x).real:.6g}, expected 1")
        object.__setattr__(self, "chi", _frozen(x))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        out = np.zeros((2, 2), dtype=complex)
        for m, em in enumerate(PAULI_BASIS):
            for n, en in enumerate(PAULI_BASIS):
                if self.chi[m, n] != 0:
                    out += self.chi[m, n] * (em @ rho @ en.conj().T)
        return out


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Exactly four 2x2 Kraus operators, zero-padded when the rank is lower."""

    ops: tuple

    def __post_init__(self):
        ops = tuple(_frozen(k) for k in self.ops)
        if len(ops) != N_KRAUS or any(k.shape != (2, 2) for k in ops):
            raise DimensionError(f"a Kraus set holds exactly {N_KRAUS} 2x2 operators")
        object.__setattr__(self, "ops", ops)

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)

    def __getitem__(self, i):
        return self.ops[i]

    @classmethod
    def padded(cls, ops: Sequence[np.ndarray]) -> "KrausSet":
        ops = list(ops)
        if len(ops) > N_KRAUS:
            raise DimensionError(f"at most {N_KRAUS} Kraus operators, got {len(ops)}")
        ops += [np.zeros((2, 2), dtype=complex)] * (N_KRAUS - len(ops))
        return cls(tuple(ops))

    @classmethod
    def from_rows(cls, rows: np.ndarray) -> "KrausSet":
        return cls(tuple(np.asarray(r).reshape(2, 2) for r in rows))

    def rows(self) -> np.ndarray:
        """4x4 matrix whose row j is the row-major vectorization of K_j."""
        return np.stack([k.reshape(4) for k in self.ops])

    def completeness_error(self) -> float:
        s = sum(k.conj().T @ k for k in self.ops)
        return float(np.linalg.norm(s - np.eye(2)))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return sum(k @ rho @ k.conj().T for k in self.ops)

    def choi(self) -> np.ndarray:
        return choi_from_kraus(self.ops)


def choi_from_kraus(ops: Sequence[np.ndarray]) -> np.ndarray:
    c = np.zeros((4, 4), dtype=complex)
    for k in ops:
        # (I (x) K)|Omega> has entry [2i + a] = K[a, i].
        v = np.asarray(k, dtype=complex).T.reshape(4)
        c += np.outer(v, v.conj())
    return c


def qpt_inputs() -> list[np.ndarray]:
    """Probe states |0><0|, |1><1|, |+><+|, |+i><+i| in that order."""
    s = 1 / np.sqrt(2)
    return [
        projector([1, 0]),
        projector([0, 1]),
        projector([s, s]),
        projector([s, 1j * s]),
    ]


def make_physical(choi: np.ndarray) -> tuple[np.ndarray, float]:
    """Hermitize, clip tiny negative eigenvalues, and restore trace preservation.

    Returns the repaired matrix and the clip magnitude. Eigenvalues below
    ``-CLIP_TOL`` are genuine non-physicality and raise.
    """
    c = (np.asarray(choi, dtype=complex) + np.asarray(choi, dtype=complex).conj().T) / 2
    w, v = np.linalg.eigh(c)
    lo = w.min()
    if lo < -CLIP_TOL:
        raise NonPhysicalChannelError(f"Choi matrix has eigenvalue {lo:.3e} below -{CLIP_TOL:g}")
    clip = float(max(0.0, -lo))
    if clip > 0:
        w = np.clip(w, 0.0, None)
        c = (v * w) @ v.conj().T
        # Congruence by P^{-1/2} (x) I keeps positivity and makes Tr_out exactly I.
        pw, pv = np.linalg.eigh(_output_trace(c))
        s = np.kron((pv / np.sqrt(pw)) @ pv.conj().T, np.eye(2))
        c = s @ c @ s.conj().T
        c = (c + c.conj().T) / 2
    return c, clip


def reconstruct_channel(apply: Callable[[np.ndarray], np.ndarray]) -> QuantumChannel:
    """Build the Choi matrix of a qubit map from its action on :func:`qpt_inputs`.

    The off-diagonal operator images follow from linearity,
    ``E(|0><1|) = E(+) + i E(+i) - (1 + i)/2 (E(0) + E(1))`` and
    ``E(|1><0|) = E(|0><1|)^dagger``.
    """
    r0, r1, rp, ri = (np.asarray(apply(rho), dtype=complex) for rho in qpt_inputs())
    e01 = rp + 1j * ri - (1 + 1j) / 2 * (r0 + r1)
    blocks = {(0, 0): r0, (1, 1): r1, (0, 1): e01, (1, 0): e01.conj().T}
    choi = np.zeros((4, 4), dtype=complex)
    for (m, n), out in blocks.items():
        choi[2 * m : 2 * m + 2, 2 * n : 2 * n + 2] = out
    deficit = np.abs(_output_trace(choi) - np.eye(2)).max()
    if deficit > TP_TOL:
        raise ReconstructionError(f"map is not trace preserving: deficit {deficit:.3e} exceeds {TP_TOL:g}")
    choi, clip = make_physical(choi)
    return QuantumChannel(choi, clip=clip)


def chi_from_choi(ch: QuantumChannel) -> ChiMatrix:
    """Project the Choi matrix onto the Pauli-product basis."""
    b = _PAULI_CHOI_VECS
    chi = b.conj().T @ ch.choi @ b / 4
    return ChiMatrix((chi + chi.conj().T) / 2)


def kraus_from_chi(x: ChiMatrix | np.ndarray) -> KrausSet:
    """Canonical Kraus operators from the eigendecomposition of chi.

    Operators are ordered by decreasing eigenvalue; eigenvalues at or below
    ``1e-10`` are dropped and the set is padded with zeros to length four.
    """
    chi = x.chi if isinstance(x, ChiMatrix) else np.asarray(x, dtype=complex)
    w, v = np.linalg.eigh((chi + chi.conj().T) / 2)
    if w.min() < -NEG_EIG_TOL:
        raise NonPhysicalChannelError(f"chi matrix has eigenvalue {w.min():.3e}")
    ops = []
    for j in np.argsort(-w, kind="stable"):
        if w[j] > KRAUS_CUTOFF:
            ops.append(np.sqrt(w[j]) * sum(v[m, j] * PAULI_BASIS[m] for m in range(4)))
    return KrausSet.padded(ops)


def chi_linear_inversion_diagnostic(apply: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """``chi_mn = 1/2 sum_i Tr(P_m rho_i) Tr(P_n^dagger E(rho_i))`` over the four probe states.

    Kept for comparison only: the four probes are not orthonormal, so this does
    not reproduce the process matrix (it gives 2 at (0, 0) for the identity).
    """
    out = np.zeros((4, 4), dtype=complex)
    for rho in qpt_inputs():
        rho_out = np.asarray(apply(rho), dtype=complex)
        a = np.array([np.trace(p @ rho) for p in PAULI_BASIS])
        b = np.array([np.trace(p.conj().T @ rho_out) for p in PAULI_BASIS])
        out += np.outer(a, b)
    return out / 2


def channel_kraus(ch: QuantumChannel) -> KrausSet:
    """Choi -> chi -> Kraus in one call."""
    return kraus_from_chi(chi_from_choi(ch))
