"""Simulation, tomography and model fitting of crosstalk attacks on a three-qubit chain."""

from .dynamics import AttackConfig, CouplingSpec, propagator, victim_channel
from .errors import NumericalError, ValidationError, XtalkError
from .fit import FitResult, fit_channel, theory_kraus
from .pulse import PulseShape, PulseSpec
from .tomo import ChiMatrix, KrausSet, QuantumChannel, channel_kraus, chi_from_choi, reconstruct_channel

__version__ = "0.1.0"
