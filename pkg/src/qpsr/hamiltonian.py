"""Parameterized Hamiltonians H(phi) and the generator of their derivative.

Two model kinds share the ``assemble`` / ``deriv_generator`` / ``unitary``
interface:

* :class:`ParamHamiltonian` -- linear model ``sum_j phi_j H_j`` with
  possibly non-commuting generators;
* :class:`FieldAngleModel` -- a qubit in the field
  ``cos(phi) sigma_x + sin(phi) sigma_z``, whose derivative generator
  depends on ``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .qcore import (
    PAULI,
    SIGMA_X,
    SIGMA_Z,
    check_hermitian,
    collective_pauli,
    embed,
    expm_hermitian,
    projector,
)


def _params(phi, d: int) -> np.ndarray:
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if phi.shape != (d,):
        raise ValueError(f"expected {d} parameter value(s), got shape {phi.shape}")
    return phi


@dataclass(frozen=True)
class ParamHamiltonian:
    generators: tuple
    param_names: tuple = ()

    def __post_init__(self):
        gens = tuple(check_hermitian(g, name=f"generator {k}") for k, g in enumerate(self.generators))
        if not gens:
            raise ValueError("at least one generator is required")
        dims = {g.shape[0] for g in gens}
        if len(dims) != 1:
            raise ValueError(f"generators have mismatched dimensions {sorted(dims)}")
        names = tuple(self.param_names) or tuple(f"phi_{k}" for k in range(len(gens)))
        if len(names) != len(gens):
            raise ValueError(f"{len(names)} names for {len(gens)} generators")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "param_names", names)

    @property
    def d(self) -> int:
        return len(self.generators)

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    def assemble(self, phi) -> np.ndarray:
        phi = _params(phi, self.d)
        return sum(p * g for p, g in zip(phi, self.generators))

    def deriv_generator(self, j: int, phi=None) -> np.ndarray:
        if not 0 <= j < self.d:
            raise IndexError(f"parameter index {j} out of range for d={self.d}")
        return self.generators[j]

    def unitary(self, t: float, phi) -> np.ndarray:
        return expm_hermitian(self.assemble(phi), t)


@dataclass(frozen=True)
class FieldAngleModel:
    """H(phi) = cos(phi) sigma_x + sin(phi) sigma_z on one qubit."""

    param_names: tuple = field(default=("phi",))
    d = 1
    dim = 2

    def assemble(self, phi) -> np.ndarray:
        (p,) = _params(phi, 1)
        return np.cos(p) * SIGMA_X + np.sin(p) * SIGMA_Z

    def deriv_generator(self, j: int, phi) -> np.ndarray:
        if j != 0:
            raise IndexError(f"parameter index {j} out of range for d=1")
        (p,) = _params(phi, 1)
        return -np.sin(p) * SIGMA_X + np.cos(p) * SIGMA_Z

    def unitary(self, t: float, phi) -> np.ndarray:
        return expm_hermitian(self.assemble(phi), t)


def exact_Yj(model, t: float, phi, j: int, quad_steps: int = 2001) -> np.ndarray:
    """Y_j = int_0^t e^{isH} (d_j H) e^{-isH} ds by composite Simpson.

    The integrand is built in the eigenbasis of H, where it is an
    elementwise phase ``exp(is(w_a - w_b))`` times the rotated generator.
    """
    if quad_steps < 2:
        raise ValueError("quad_steps must be >= 2")
    H = model.assemble(phi)
    G = model.deriv_generator(j, phi)
    w, V = np.linalg.eigh(H)
    Gt = V.conj().T @ G @ V
    s = np.linspace(0.0, t, quad_steps)
    gaps = w[:, None] - w[None, :]
    integrand = np.exp(1j * s[:, None, None] * gaps) * Gt
    Y = simpson(integrand, x=s, axis=0)
    return V @ Y @ V.conj().T


def closed_form_Yphi(t: float, phi: float) -> np.ndarray:
    """Analytic Y_phi for :class:`FieldAngleModel`."""
    s2, c, s = np.sin(2 * t), np.cos(phi), np.sin(phi)
    sq = np.sin(t) ** 2
    return 0.5 * np.array(
        [[s2 * c, -s2 * s - 2j * sq], [-s2 * s + 2j * sq, -s2 * c]],
        dtype=complex,
    )


def field_angle_qfi(t, phi):
    """Closed-form QFI of the |+> probe: 4 sin^2 t (1 - cos^2 t sin^2 phi)."""
    t = np.asarray(t, dtype=float)
    return 4 * np.sin(t) ** 2 * (1 - np.cos(t) ** 2 * np.sin(phi) ** 2)


def ghz3_total_variance(t, phi):
    """tr[Q^-1] for the 3-qubit GHZ probe under phi*(J_x + J_y + J_z).

    Derived from the pure-state QFIM of the exact evolution; the
    coefficient 21 is what the numerical QFIM reproduces to rounding.
    """
    t = np.asarray(t, dtype=float)
    return 7 / (108 * t**2) + 21 * phi**2 / (54 * np.sin(np.sqrt(3) * phi * t) ** 2)


def generator_from_spec(spec: str, n: int) -> np.ndarray:
    """Build a generator from a config string.

    ``pauli:<axis>:<qubit>``, ``collective:<axis>`` or
    ``projector:<a0>,<a1>,...`` (amplitudes accept Python complex syntax,
    e.g. ``1,1j``).
    """
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "pauli":
        axis, _, qubit = rest.partition(":")
        if axis not in ("x", "y", "z") or not qubit.strip().isdigit():
            raise ValueError(f"bad pauli generator {spec!r}; expected pauli:<x|y|z>:<qubit>")
        return embed(PAULI[axis], int(qubit), n)
    if kind == "collective":
        return collective_pauli(rest.strip(), n)
    if kind == "projector":
        try:
            amps = [complex(a.strip().replace(" ", "")) for a in rest.split(",")]
        except ValueError as exc:
            raise ValueError(f"bad projector amplitudes in {spec!r}") from exc
        if len(amps) != 2**n:
            raise ValueError(f"projector {spec!r} has {len(amps)} amplitudes, need {2**n}")
        return projector(amps)
    raise ValueError(f"unknown generator kind {kind!r} in {spec!r}")
