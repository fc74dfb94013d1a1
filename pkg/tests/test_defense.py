import math

import numpy as np
import pytest

from xtalk.defense import (
    COIN_GRID,
    DetectionReport,
    canary_check,
    containment_compare,
    shot_rng,
    z_score,
)
from xtalk.dynamics import AttackConfig, CouplingSpec, victim_channel
from xtalk.errors import ValidationError
from xtalk.io import bundled_dataset_path, load_dataset
from xtalk.protocols import ScenarioTiming, sqqnn_train, train_test_split
from xtalk.pulse import PulseSpec
from xtalk.tomo import QuantumChannel

STRONG = AttackConfig().with_amplitudes(1.0, 1.0)


@pytest.fixture(scope="module")
def strong():
    return victim_channel(STRONG)


def test_no_attack_not_flagged():
    r = canary_check(10_000, seed=3)
    assert not r.flagged and r.p_exact == pytest.approx(0.5)


def test_fair_coin_estimate():
    r = canary_check(10_000, seed=1)
    assert abs(r.p_hat - 0.5) <= 0.05


def test_z_score_formula():
    r = canary_check(2_000, seed=7, threshold=2.0)
    assert r.z_score == abs(r.p_hat - r.baseline) / math.sqrt(r.baseline * (1 - r.baseline) / r.n_shots)
    assert r.flagged == (r.z_score > r.threshold)


def test_reproducible(strong):
    a = canary_check(5_000, 11, channel=strong, timing="attacker-first")
    b = canary_check(5_000, 11, channel=strong, timing="attacker-first")
    assert a == b


def test_generator_is_philox_stream():
    expect = np.random.Generator(np.random.Philox(5)).random(4)
    assert np.array_equal(shot_rng(5).random(4), expect)


def test_report_dict():
    d = canary_check(100, 0).to_dict()
    assert d["generator"].endswith("Philox)") and d["numpy_version"] == np.__version__
    assert {"p_hat", "baseline", "n_shots", "z_score", "flagged", "seed", "threshold"} <= set(d)


def test_invalid_arguments():
    with pytest.raises(ValidationError):
        canary_check(99, 0)
    with pytest.raises(ValidationError):
        canary_check(1000, 0, threshold=0.0)


def test_flags_strong_attacker_first(strong):
    assert canary_check(10_000, 0, channel=strong, timing=ScenarioTiming.ATTACKER_FIRST).flagged


def test_flags_biased_channel():
    # Resetting to |1> just before measurement pins the canary at p1 = 1.
    to_one = QuantumChannel.from_kraus([np.array([[0, 0], [1, 0]]), np.array([[0, 0], [0, 1]])])
    r = canary_check(1_000, 0, channel=to_one, timing="victim-first")
    assert r.flagged and r.p_hat == 1.0


def test_containment_identity():
    r = containment_compare(QuantumChannel.identity(), "coin")
    assert r.attacker_first_impact <= 1e-15 and r.post_reset_impact <= 1e-15


def test_containment_coin_strong(strong):
    r = containment_compare(strong, "coin")
    assert r.post_reset_impact <= r.attacker_first_impact + 1e-9


def test_containment_sqqnn(strong):
    x, y = load_dataset(bundled_dataset_path())
    train, test = train_test_split(len(y))
    m = sqqnn_train(x[train], y[train], 2)
    r = containment_compare(strong, "sqqnn", model=m, features=x[test], labels=y[test])
    assert r.post_reset_impact <= r.attacker_first_impact
    ident = containment_compare(QuantumChannel.identity(), "sqqnn", model=m, features=x[test], labels=y[test])
    assert (ident.attacker_first_impact, ident.post_reset_impact) == (0.0, 0.0)


def test_containment_sqqnn_needs_model(strong):
    with pytest.raises(ValidationError):
        containment_compare(strong, "sqqnn")


def test_coin_grid():
    assert len(COIN_GRID) == 19 and COIN_GRID[-1] == pytest.approx(math.pi / 2)
