"""Dense linear algebra and quantum primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The three-qubit
register is ordered q0 (x) q1 (x) q2, so basis index ``b = 4*b0 + 2*b1 + b2``
and the victim qubit q2 is the last tensor factor.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .errors import DimensionError, ValidationError

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

PAULI = {"I": I2, "X": SX, "Y": SY, "Z": SZ}
#: Pauli operator basis {I, X, Y, Z} in that order.
PAULI_BASIS = (I2, SX, SY, SZ)

for _m in PAULI_BASIS:
    _m.flags.writeable = False

HERMITIAN_TOL = 1e-10


def kron(a: np.ndarray, b: np.ndarray, *rest: np.ndarray) -> np.ndarray:
    """Kronecker product of two or more matrices, left to right."""
    return reduce(np.kron, (b, *rest), np.asarray(a, dtype=complex))


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def is_hermitian(a: np.ndarray, atol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.allclose(a, a.conj().T, rtol=0, atol=atol)


def is_unitary(u: np.ndarray, atol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) <= atol


def check_density(rho: np.ndarray, dim: int | None = None, atol: float = 1e-10) -> np.ndarray:
    """Validate a density matrix and return it as a complex array.

    Parameters
    ----------
    rho : array_like
        Candidate state.
    dim : int, optional
        Required dimension. When omitted, 2 and 8 are accepted.
    atol : float
        Tolerance used for the Hermiticity, trace and positivity checks.

    Raises
    ------
    DimensionError
        If ``rho`` is not square of the expected dimension.
    ValidationError
        If ``rho`` is not Hermitian, not unit trace, or not positive semidefinite.
    """
    rho = np.asarray(rho, dtype=complex)
    allowed = (dim,) if dim is not None else (2, 8)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in allowed:
        raise DimensionError(f"expected a density matrix of dimension {allowed}, got shape {rho.shape}")
    if not is_hermitian(rho, atol):
        raise ValidationError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1) > atol:
        raise ValidationError(f"density matrix has trace {tr.real:.3e}, expected 1")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -atol:
        raise ValidationError(f"density matrix has negative eigenvalue {lo:.3e}")
    return rho


def partial_trace_keep_last(rho: np.ndarray) -> np.ndarray:
    """Reduced state of q2 from an 8x8 register state, tracing out q0 and q1."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (8, 8):
        raise DimensionError(f"expected an 8x8 matrix, got shape {rho.shape}")
    return np.einsum("aiaj->ij", rho.reshape(4, 2, 4, 2))


def expm_hermitian(h: np.ndarray, tau: float) -> np.ndarray:
    """Return ``exp(-1j * h * tau)`` for Hermitian ``h``.

    The eigendecomposition route keeps the result unitary to machine precision,
    which a generic Pade approximant does not guarantee.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise ValidationError("expm_hermitian requires a Hermitian generator")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * tau * w)) @ v.conj().T


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a Ginibre ensemble of the given rank."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2
