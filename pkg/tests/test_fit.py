import math

import numpy as np
import pytest

from xtalk.dynamics import AttackConfig, victim_channel
from xtalk.errors import ValidationError
from xtalk.fit import (
    FitResult,
    alternating_fit,
    canonical_theta,
    fit_channel,
    golden_section,
    isometry_loss,
    procrustes_isometry,
    start_grid,
    theory_kraus,
)
from xtalk.qcore import I2, SX, random_unitary
from xtalk.tomo import KrausSet, channel_kraus

THETAS = -math.pi / 2 + math.pi * np.arange(33) / 33


def mod_pi(d):
    return abs((d + math.pi / 2) % math.pi - math.pi / 2)


def remix(k: KrausSet, q: np.ndarray) -> KrausSet:
    return KrausSet.from_rows(q @ k.rows())


def test_theory_kraus_at_zero():
    k = theory_kraus(0.0)
    for got, want in zip(k, (I2 / 2, SX / 2, SX / 2, I2 / 2)):
        assert np.abs(got - want).max() <= 1e-15


def test_theory_kraus_complete():
    for th in np.linspace(-3, 3, 13):
        k = theory_kraus(th)
        assert k.completeness_error() <= 1e-12
        for op in k:
            assert np.abs(op.conj().T @ op - I2 / 4).max() <= 1e-12


def test_theory_kraus_pi_periodic_channel():
    for th in (-1.1, 0.0, 0.4, 1.5):
        assert np.abs(theory_kraus(th).choi() - theory_kraus(th + math.pi).choi()).max() <= 1e-12


def test_procrustes_identity_and_permutation():
    th = theory_kraus(0.4)
    assert isometry_loss(th, th, procrustes_isometry(th, th)) <= 1e-24
    perm = np.eye(4)[[2, 0, 3, 1]]
    u = procrustes_isometry(remix(th, perm), th)
    assert np.abs(u - perm).max() <= 1e-12


def test_procrustes_beats_random_unitaries(rng):
    th = theory_kraus(0.9)
    q = random_unitary(4, rng)
    exp = remix(theory_kraus(0.2), q)
    u = procrustes_isometry(exp, th)
    best = isometry_loss(exp, th, u)
    assert best <= isometry_loss(exp, th, q) + 1e-12
    assert all(best <= isometry_loss(exp, th, random_unitary(4, rng)) + 1e-12 for _ in range(1000))


def test_golden_section_quadratic():
    x, fx = golden_section(lambda x: (x - 0.3) ** 2 + 1, -1, 2)
    assert abs(x - 0.3) <= 1e-5 and fx == pytest.approx(1.0)


def test_start_grid():
    g = start_grid()
    assert len(g) == 64 and g[0] == -math.pi / 2 and g[-1] < math.pi / 2


def test_recover_point_three():
    r = fit_channel(theory_kraus(0.3))
    assert abs(r.theta - 0.3) <= 1e-6 and r.loss <= 1e-10


def test_recover_zero():
    r = fit_channel(theory_kraus(0.0))
    assert abs(r.theta) <= 1e-6 and r.loss <= 1e-10


@pytest.mark.parametrize("theta", THETAS[::4])
def test_recovery_grid_sample(theta):
    r = fit_channel(theory_kraus(theta))
    assert mod_pi(r.theta - theta) <= 1e-6 and r.loss <= 1e-10
    assert -math.pi / 2 <= r.theta < math.pi / 2


def test_gauge_invariance(rng):
    exp = channel_kraus(victim_channel(AttackConfig()))
    base = fit_channel(exp)
    for _ in range(5):
        r = fit_channel(remix(exp, random_unitary(4, rng)))
        assert abs(r.theta - base.theta) <= 1e-8 and abs(r.loss - base.loss) <= 1e-10


def test_gauge_invariance_model_member(rng):
    exp = theory_kraus(0.7)
    for _ in range(3):
        r = fit_channel(remix(exp, random_unitary(4, rng)))
        assert abs(r.theta - 0.7) <= 1e-6


def test_result_invariants():
    r = fit_channel(channel_kraus(victim_channel(AttackConfig().with_amplitudes(1.0, 1.0))))
    assert np.linalg.norm(r.iso.conj().T @ r.iso - np.eye(4)) <= 1e-8
    exp = channel_kraus(victim_channel(AttackConfig().with_amplitudes(1.0, 1.0)))
    assert abs(isometry_loss(exp, theory_kraus(r.theta), r.iso) - r.loss) <= 1e-10
    assert r.converged


def test_monotone_loss_history(rng):
    exp = remix(channel_kraus(victim_channel(AttackConfig())), random_unitary(4, rng))
    for theta0 in (-1.5, -0.2, 0.9):
        history = alternating_fit(exp, theta0)[-1]
        assert all(b <= a + 1e-15 for a, b in zip(history, history[1:]))


def test_canonical_theta_keeps_loss():
    exp = theory_kraus(0.5)
    th = 0.5 + math.pi
    iso = procrustes_isometry(exp, theory_kraus(th))
    th_c, iso_c = canonical_theta(th, iso)
    assert th_c == pytest.approx(0.5)
    assert isometry_loss(exp, theory_kraus(th_c), iso_c) == pytest.approx(isometry_loss(exp, theory_kraus(th), iso), abs=1e-12)


def test_incomplete_set_rejected():
    with pytest.raises(ValidationError):
        fit_channel(KrausSet.padded([I2 / 2]))


def test_to_dict():
    d = FitResult(0.1, 0.0, np.eye(4, dtype=complex), 3, True).to_dict()
    assert d["iso"][0][0] == [1.0, 0.0] and d["iterations"] == 3


def test_driver_golden(golden):
    for key, ref in golden["fit_driver"].items():
        r = fit_channel(channel_kraus(victim_channel(AttackConfig().with_amplitudes(a1=float(key)))))
        assert abs(r.theta - ref["theta"]) <= 1e-8
        assert abs(r.loss - ref["loss"]) <= 1e-8


def test_driver_amplitude_orders_theta():
    thetas = [
        fit_channel(channel_kraus(victim_channel(AttackConfig().with_amplitudes(a1=a)))).theta
        for a in (0.2, 0.5, 1.0)
    ]
    assert thetas[0] < thetas[1] < thetas[2] or thetas[0] > thetas[1] > thetas[2]
