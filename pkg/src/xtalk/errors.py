"""Exception hierarchy.

Validation problems (bad inputs, configs, datasets) derive from
:class:`ValidationError`; failures of the numerics themselves derive from
:class:`NumericalError`. The CLI maps the two families to exit codes 1 and 2.
"""


class XtalkError(Exception):
    """Base class for all package errors."""


class ValidationError(XtalkError, ValueError):
    """An input violates a documented invariant."""


class DimensionError(ValidationError):
    """A matrix has the wrong shape."""


class RangeError(ValidationError):
    """A scalar argument lies outside its allowed interval."""


class TrainingError(ValidationError):
    """The classifier cannot be trained on the given data."""


class DatasetError(ValidationError):
    """A dataset file is missing or malformed."""


class ConfigError(ValidationError):
    """A run configuration is malformed."""


class NumericalError(XtalkError, ArithmeticError):
    """A numerical routine produced a non-physical or inconsistent result."""


class ReconstructionError(NumericalError):
    """Tomographic data is not trace preserving."""


class NonPhysicalChannelError(NumericalError):
    """A process matrix has a significantly negative eigenvalue."""
