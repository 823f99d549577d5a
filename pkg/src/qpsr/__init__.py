"""Stochastic parameter-shift derivatives and Fisher-information tools for quantum metrology."""

__version__ = "0.1.0"

from .errors import InvalidShiftError, NumericalGuardError, SingularFisherError  # noqa: E402

__all__ = ["InvalidShiftError", "NumericalGuardError", "SingularFisherError", "__version__"]
