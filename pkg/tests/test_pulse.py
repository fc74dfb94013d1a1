import math

import numpy as np
import pytest

from xtalk.errors import RangeError, ValidationError
from xtalk.pulse import PulseShape, PulseSpec, envelope, eval_pulse

GRID = np.linspace(0, 1, 1000)


def test_square_closed_window():
    spec = PulseSpec(PulseShape.SQUARE, amplitude=1.0)
    assert eval_pulse(spec, 0.5) == 1.0
    assert eval_pulse(spec, 0.1) == 0.0
    assert eval_pulse(spec, 0.3) == 1.0
    assert eval_pulse(spec, 0.7) == 1.0
    assert eval_pulse(spec, 0.7 + 1e-12) == 0.0


def test_gaussian_peak():
    assert eval_pulse(PulseSpec("gaussian", amplitude=0.8, sigma=0.15), 0.5) == 0.8


def test_drag_centre_equals_amplitude():
    for alpha in (-2.0, 0.0, 0.5, 3.0):
        spec = PulseSpec("drag", amplitude=0.7, sigma=0.1, drag_alpha=alpha)
        assert eval_pulse(spec, 0.5) == 0.7


def test_chirp_at_zero():
    assert eval_pulse(PulseSpec("chirp", amplitude=0.5), 0.0) == 0.5


def test_cosine_and_chirp_formulas():
    cos = PulseSpec("cosine", amplitude=0.4, detuning=3.0)
    chirp = PulseSpec("chirp", amplitude=0.4, detuning=3.0, chirp_rate=7.0)
    t = 0.37
    assert math.isclose(eval_pulse(cos, t), 0.4 * math.cos(3.0 * t), abs_tol=1e-15)
    assert math.isclose(eval_pulse(chirp, t), 0.4 * math.cos((3.0 + 7.0 * t) * t), abs_tol=1e-15)


def test_drag_formula():
    spec = PulseSpec("drag", amplitude=0.9, sigma=0.2, drag_alpha=0.3)
    t = 0.62
    g = math.exp(-((t - 0.5) ** 2) / (2 * 0.04))
    assert math.isclose(eval_pulse(spec, t), 0.9 * (g - 0.3 * (t - 0.5) / 0.04 * g), abs_tol=1e-15)


def test_time_out_of_range():
    spec = PulseSpec()
    for t in (-1e-9, 1.0000001, 2.0):
        with pytest.raises(RangeError):
            eval_pulse(spec, t)


@pytest.mark.parametrize("shape", list(PulseShape))
def test_amplitude_bound(shape):
    spec = PulseSpec(shape, amplitude=0.9, drag_alpha=0.5, sigma=0.15)
    f = np.abs(envelope(spec, GRID))
    if shape is PulseShape.DRAG:
        bound = 0.9 * (1 + 0.5 * np.abs(GRID - 0.5).max() / 0.15**2)
    else:
        bound = 0.9
    assert f.max() <= bound + 1e-15


@pytest.mark.parametrize("shape", list(PulseShape))
def test_zero_amplitude_is_silent(shape):
    assert not np.any(envelope(PulseSpec(shape, amplitude=0.0, detuning=17.0, drag_alpha=4.0), GRID))


def test_gaussian_symmetric():
    spec = PulseSpec("gaussian", amplitude=1.0)
    u = np.linspace(0, 0.5, 101)
    assert np.abs(envelope(spec, 0.5 - u) - envelope(spec, 0.5 + u)).max() <= 1e-14


def test_drag_correction_antisymmetric():
    spec = PulseSpec("drag", amplitude=1.0, drag_alpha=0.5)
    gauss = PulseSpec("gaussian", amplitude=1.0)
    u = np.linspace(0, 0.5, 101)
    corr = lambda t: envelope(spec, t) - envelope(gauss, t)  # noqa: E731
    assert np.abs(corr(0.5 - u) + corr(0.5 + u)).max() <= 1e-14


@pytest.mark.parametrize(
    "kwargs",
    [
        {"amplitude": 1.5},
        {"amplitude": -0.1},
        {"shape": "gaussian", "sigma": 0.0},
        {"shape": "drag", "sigma": -1.0},
        {"detuning": float("nan")},
        {"shape": "sawtooth"},
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(ValidationError):
        PulseSpec(**kwargs)


def test_square_ignores_sigma():
    PulseSpec("square", sigma=0.0)


def test_defaults():
    spec = PulseSpec()
    assert (spec.detuning, spec.chirp_rate, spec.drag_alpha, spec.sigma) == (5.0, 10.0, 0.5, 0.15)
    assert spec.amplitude_max == 1.0
