"""Fit a channel to the single-angle logical model under Kraus gauge freedom.

The model channel has the four Kraus operators
``{I/2, M/2, X/2, M X/2}`` with ``M = R_Y(-theta) X R_Y(theta)`` and the
half-angle convention ``R_Y(theta) = exp(-i theta Y / 2)``. The fit minimizes

    sum_j || K_exp_j - sum_i U_ji K_model_i(theta) ||_F^2

jointly over theta and a 4x4 unitary ``U``. The two blocks are minimized
alternately: for fixed theta the best ``U`` is an orthogonal Procrustes
solution, and for fixed ``U`` the objective is a pure sinusoid in theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .qcore import I2, SX, SY
from .tomo import KrausSet

N_STARTS = 64
MAX_ROUNDS = 100
LOSS_TOL = 1e-12
TIE_TOL = 1e-9
BASIN_TOL = 1e-4
COMPLETENESS_TOL = 1e-8

INVPHI = (math.sqrt(5) - 1) / 2
INVPHI2 = (3 - math.sqrt(5)) / 2

# theta -> theta + pi flips the sign of the 2nd and 4th model operators.
_PI_SHIFT = np.diag([1.0, -1.0, 1.0, -1.0]).astype(complex)


def ry(theta: float) -> np.ndarray:
    return math.cos(theta / 2) * I2 - 1j * math.sin(theta / 2) * SY


def theory_kraus(theta: float) -> KrausSet:
    m = ry(-theta) @ SX @ ry(theta)
    return KrausSet((I2 / 2, m / 2, SX / 2, m @ SX / 2))


def isometry_loss(exp: KrausSet | np.ndarray, th: KrausSet | np.ndarray, iso: np.ndarray) -> float:
    e = exp.rows() if isinstance(exp, KrausSet) else np.asarray(exp)
    t = th.rows() if isinstance(th, KrausSet) else np.asarray(th)
    r = e - iso @ t
    return float(np.vdot(r, r).real)


def _procrustes_rows(e: np.ndarray, t: np.ndarray) -> np.ndarray:
    v, _, wh = np.linalg.svd(e @ t.conj().T)
    return v @ wh


def procrustes_isometry(exp: KrausSet, th: KrausSet) -> np.ndarray:
    """Unitary ``U`` minimizing ``sum_j ||K_exp_j - sum_i U_ji K_th_i||_F^2``.

    With the operators vectorized into the rows of ``E`` and ``T`` and the
    singular value decomposition ``E T^dagger = V S W^dagger``, the minimizer
    is ``U = V W^dagger``.
    """
    return _procrustes_rows(exp.rows(), th.rows())


def golden_section(f, lo: float, hi: float, xtol: float = 1e-10, maxiter: int = 200) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    h = b - a
    c = a + INVPHI2 * h
    d = a + INVPHI * h
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if h <= xtol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            h = INVPHI * h
            c = a + INVPHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = INVPHI * h
            d = a + INVPHI * h
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


class _Problem:
    """Precomputed pieces of the objective for one experimental Kraus set."""

    def __init__(self, exp: KrausSet):
        self.e = exp.rows()
        # Model rows are affine in (cos theta, sin theta): T = T0 + cos*Tc + sin*Ts.
        t0 = theory_kraus(0.0).rows()
        tq = theory_kraus(math.pi / 2).rows()
        tm = theory_kraus(-math.pi / 2).rows()
        self.ts = (tq - tm) / 2
        self.tc = t0 - (tq + tm) / 2
        self.t0 = (tq + tm) / 2

    def rows(self, theta: float) -> np.ndarray:
        return self.t0 + math.cos(theta) * self.tc + math.sin(theta) * self.ts

    def loss(self, theta: float, iso: np.ndarray) -> float:
        r = self.e - iso @ self.rows(theta)
        return float(np.vdot(r, r).real)

    def best_iso(self, theta: float) -> np.ndarray:
        return _procrustes_rows(self.e, self.rows(theta))

    def theta_step(self, theta: float, iso: np.ndarray) -> tuple[float, float]:
        """Minimize over theta with ``iso`` fixed; never returns a worse point."""
        # With iso fixed the loss is exactly a + b cos(theta) + c sin(theta).
        r0 = self.e - iso @ self.t0
        uc = iso @ self.tc
        us = iso @ self.ts
        a = float(np.vdot(r0, r0).real + np.vdot(uc, uc).real)
        b = -2 * float(np.vdot(r0, uc).real)
        c = -2 * float(np.vdot(r0, us).real)
        f = lambda x: a + b * math.cos(x) + c * math.sin(x)  # noqa: E731
        current = self.loss(theta, iso)
        if math.hypot(b, c) <= 1e-300:
            return theta, current
        centre = math.atan2(-c, -b)
        # The sinusoid is unimodal on any half-period window around its minimum.
        xg, fg = golden_section(f, centre - math.pi / 2, centre + math.pi / 2)
        best = xg if fg < f(centre) - 1e-15 else centre
        fbest = self.loss(best, iso)
        if fbest < current:
            return best, fbest
        return theta, current

    def run(self, theta0: float) -> tuple[float, np.ndarray, float, int, bool, list[float]]:
        theta = theta0
        iso = self.best_iso(theta)
        loss = self.loss(theta, iso)
        history = [loss]
        converged = False
        rounds = 0
        for rounds in range(1, MAX_ROUNDS + 1):
            iso = self.best_iso(theta)
            theta, new = self.theta_step(theta, iso)
            new = min(new, self.loss(theta, iso))
            history.append(new)
            change = loss - new
            loss = new
            if change < LOSS_TOL:
                converged = True
                break
        return theta, iso, loss, rounds, converged, history


def canonical_theta(theta: float, iso: np.ndarray) -> tuple[float, np.ndarray]:
    """Shift theta into [-pi/2, pi/2) and compensate the isometry so the loss is unchanged."""
    k = math.floor((theta + math.pi / 2) / math.pi)
    theta_c = theta - k * math.pi
    if theta_c >= math.pi / 2:  # rounding at the upper edge
        theta_c -= math.pi
        k += 1
    if k % 2:
        iso = iso @ _PI_SHIFT
    return theta_c, iso


@dataclass(frozen=True, eq=False)
class FitResult:
    theta: float
    loss: float
    iso: np.ndarray
    iterations: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "loss": self.loss,
            "iso": [[[float(z.real), float(z.imag)] for z in row] for row in self.iso],
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _wrap(d: float) -> float:
    return (d + math.pi / 2) % math.pi - math.pi / 2


def start_grid(n: int = N_STARTS) -> np.ndarray:
    return -math.pi / 2 + math.pi * np.arange(n) / n


def alternating_fit(exp: KrausSet, theta0: float):
    """Single start of the alternating minimization.

    Returns ``(theta, iso, loss, rounds, converged, history)`` where
    ``history`` holds the loss after each round.
    """
    return _Problem(exp).run(theta0)


def fit_channel(exp: KrausSet, starts: int = N_STARTS) -> FitResult:
    """Best-fit model angle and gauge for an experimental Kraus set.

    Every point of a uniform grid on [-pi/2, pi/2) seeds an alternating run;
    the lowest loss wins, with losses within ``1e-9`` of each other resolved
    toward the smaller ``|theta|``.
    """
    err = exp.completeness_error()
    if err > COMPLETENESS_TOL:
        raise ValidationError(f"Kraus set is not complete (||sum K^dag K - I|| = {err:.3e})")
    problem = _Problem(exp)
    candidates = []
    for theta0 in start_grid(starts):
        theta, iso, loss, rounds, converged, _ = problem.run(float(theta0))
        theta, iso = canonical_theta(theta, iso)
        candidates.append((problem.loss(theta, iso), theta, iso, rounds, converged))
    # One representative per minimum: starts landing in the same basin differ
    # only by convergence noise, and only distinct minima compete on the tie rule.
    minima: list[tuple] = []
    for cand in sorted(candidates, key=lambda c: (c[0], c[1])):
        if all(abs(_wrap(cand[1] - m[1])) > BASIN_TOL for m in minima):
            minima.append(cand)
    best_loss = minima[0][0]
    tied = [m for m in minima if m[0] <= best_loss + TIE_TOL]
    loss, theta, iso, rounds, converged = min(tied, key=lambda c: (abs(c[1]), c[1], c[0]))
    return FitResult(theta=theta, loss=loss, iso=iso, iterations=rounds, converged=converged)
