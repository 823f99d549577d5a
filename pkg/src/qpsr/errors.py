"""Exception types shared across the package."""

from __future__ import annotations

import numpy as np


class NumericalGuardError(ArithmeticError):
    """A numerical precondition failed (degenerate shift, singular matrix, ...)."""


class InvalidShiftError(NumericalGuardError, ValueError):
    """The product t*mu hits a zero of the shift-rule denominator."""


class SingularFisherError(NumericalGuardError):
    """Raised when a Fisher matrix cannot be inverted.

    ``null_direction`` is the unit eigenvector of the smallest eigenvalue,
    i.e. the parameter combination the measurement carries no information on.
    """

    def __init__(self, message: str, null_direction: np.ndarray, condition: float):
        super().__init__(message)
        self.null_direction = null_direction
        self.condition = condition
