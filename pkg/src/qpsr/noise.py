"""Kraus channels, in particular time-dependent Markovian dephasing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import TOL, density, embed, evolve, num_qubits


@dataclass(frozen=True)
class KrausChannel:
    operators: tuple
    label: str = "kraus"

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        completeness = sum(k.conj().T @ k for k in ops)
        resid = np.max(np.abs(completeness - np.eye(dim)))
        if resid > TOL.unitary:
            raise ValueError(f"Kraus operators are not complete: residual {resid:.3e}")
        object.__setattr__(self, "operators", ops)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        """Apply the channel to every qubit of ``rho`` (see :func:`apply_channel_all`)."""
        return apply_channel_all(self, rho)


def dephasing_channel(gamma: float, t: float) -> KrausChannel:
    """K1 = diag(p, 1), K2 = diag(sqrt(1 - p^2), 0) with p = exp(-gamma t)."""
    if gamma < 0 or t < 0:
        raise ValueError(f"gamma and t must be non-negative, got gamma={gamma}, t={t}")
    p = np.exp(-gamma * t)
    k1 = np.diag([p, 1.0]).astype(complex)
    k2 = np.diag([np.sqrt(max(0.0, 1.0 - p * p)), 0.0]).astype(complex)
    return KrausChannel((k1, k2), label=f"dephasing(gamma={gamma!r},t={t!r})")


def apply_channel(channel: KrausChannel, rho: np.ndarray, qubit: int) -> np.ndarray:
    """Apply a single-qubit channel to one qubit.  ``rho`` may be a stack (..., D, D)."""
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho.shape[-1])
    if channel.operators[0].shape != (2, 2):
        raise ValueError("only single-qubit channels can be applied per qubit")
    out = np.zeros_like(rho)
    for k in channel.operators:
        K = embed(k, qubit, n)
        out += K @ rho @ K.conj().T
    return out


def apply_channel_all(channel: KrausChannel, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim < 2 or rho.shape[-1] != rho.shape[-2]:
        raise ValueError(f"expected a density matrix, got shape {rho.shape}")
    for q in range(num_qubits(rho.shape[-1])):
        rho = apply_channel(channel, rho, q)
    return rho


def noisy_evolved_state(model, rho0, t: float, phi, gamma: float) -> np.ndarray:
    """Dephasing with p(t) = exp(-gamma t) applied after the unitary evolution."""
    rho = evolve(model.unitary(t, phi), density(rho0))
    return apply_channel_all(dephasing_channel(gamma, t), rho)
