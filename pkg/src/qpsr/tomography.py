"""Quantum-quench Hamiltonian tomography.

For H = sum_l x_l H_l every initial/evolved pair conserves <H>, so the
matrix X_kl = tr[rho0_k H_l] - tr[rho_k(x) H_l] annihilates the coupling
vector x.  The couplings are recovered (up to scale) as the null vector of
X, and the precision of the protocol is judged by the classical Fisher
matrix F_ij = sum_kl |X_kl|^-1 d_i X_kl d_j X_kl.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .derivatives import StocConfig, finite_difference, stoc_psr_mixed
from .fisher import FisherMatrix
from .hamiltonian import ParamHamiltonian
from .qcore import evolve, haar_state, kron_all, num_qubits, projector

ISING2_STATES = (
    np.array([1, 0], dtype=complex),
    np.array([1, 1], dtype=complex) / np.sqrt(2),
    np.array([1, 1j], dtype=complex) / np.sqrt(2),
)


def ising2_generators() -> tuple:
    """Projectors onto |0>, |+> and |+i>."""
    return tuple(projector(v) for v in ISING2_STATES)


@dataclass(frozen=True)
class QuenchInstance:
    generators: tuple
    true_x: np.ndarray
    t: float
    pairs: tuple  # ((rho0, rho_t), ...)

    def __post_init__(self):
        x = np.asarray(self.true_x, dtype=float)
        object.__setattr__(self, "true_x", x)
        U = self.model.unitary(self.t, x)
        for k, (r0, rt) in enumerate(self.pairs):
            err = np.max(np.abs(evolve(U, r0) - rt))
            if err > 1e-10:
                raise ValueError(f"pair {k} is not an exact evolution (error {err:.3e})")

    @property
    def model(self) -> ParamHamiltonian:
        return ParamHamiltonian(tuple(self.generators))

    @property
    def p(self) -> int:
        return len(self.pairs)

    @property
    def d(self) -> int:
        return len(self.generators)

    def head(self, p: int) -> QuenchInstance:
        """The same instance restricted to its first p pairs."""
        return QuenchInstance(self.generators, self.true_x, self.t, self.pairs[:p])


def make_instance(generators, true_x, t: float, p: int, seed: int) -> QuenchInstance:
    """Exact instance with p initial states that are products of Haar single-qubit states."""
    generators = tuple(generators)
    n = num_qubits(generators[0].shape[0])
    rng = np.random.default_rng(seed)
    U = ParamHamiltonian(generators).unitary(t, true_x)
    pairs = []
    for _ in range(p):
        psi = kron_all([haar_state(2, rng) for _ in range(n)])
        rho0 = np.outer(psi, psi.conj())
        pairs.append((rho0, evolve(U, rho0)))
    return QuenchInstance(generators, np.asarray(true_x, dtype=float), t, tuple(pairs))


def conservation_residual(rho0, rhot, H) -> float:
    return float(np.real(np.trace(rho0 @ H) - np.trace(rhot @ H)))


@dataclass(frozen=True)
class QuenchMatrix:
    entries: np.ndarray

    @property
    def p(self) -> int:
        return self.entries.shape[0]

    @property
    def d(self) -> int:
        return self.entries.shape[1]


def build_X(instance: QuenchInstance) -> QuenchMatrix:
    X = np.array(
        [[conservation_residual(r0, rt, H) for H in instance.generators] for r0, rt in instance.pairs]
    )
    return QuenchMatrix(X.reshape(instance.p, instance.d))


class CouplingFit(NamedTuple):
    x: np.ndarray
    residual: float
    degenerate: bool
    singular_values: np.ndarray


def solve_couplings(X: QuenchMatrix, degeneracy_tol: float = 1e-8) -> CouplingFit:
    """Unit null vector of X (smallest right-singular vector).

    The sign is fixed so that the largest-magnitude entry is positive.
    ``degenerate`` flags a null space of dimension > 1 (couplings not
    identifiable even up to scale).
    """
    A = np.asarray(X.entries, dtype=float)
    p, d = A.shape
    if p < d - 1:
        raise ValueError(f"need at least d-1 = {d - 1} pairs, got p = {p}")
    if p < d:
        A = np.vstack([A, np.zeros((d - p, d))])
    _, sv, Vt = np.linalg.svd(A)
    x = Vt[-1]
    x = x / np.linalg.norm(x)
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    scale = max(sv[0], 1.0)
    degenerate = d > 1 and sv[-2] <= degeneracy_tol * scale
    return CouplingFit(x, float(sv[-1]), bool(degenerate), sv)


def quench_derivatives(
    instance: QuenchInstance,
    method: str,
    cfg: StocConfig | None = None,
    eps: float = 1e-5,
    stream: tuple = (),
    workers: int = 1,
) -> np.ndarray:
    """dX[k, l, j] = -tr[(d rho_k / d x_j) H_l]."""
    model = instance.model
    x = instance.true_x
    out = np.zeros((instance.p, instance.d, instance.d))
    for k, (r0, _) in enumerate(instance.pairs):
        for j in range(instance.d):
            if method == "stoc":
                if cfg is None:
                    raise ValueError("the stoc method needs a StocConfig")
                if abs(cfg.t - instance.t) > 1e-12:
                    raise ValueError(f"StocConfig.t={cfg.t} differs from instance t={instance.t}")
                drho = stoc_psr_mixed(model, r0, j, x, cfg, stream=(*stream, k), workers=workers).value
            elif method == "fd":
                drho = finite_difference(model, r0, j, x, instance.t, eps).value
            else:
                raise ValueError(f"unknown derivative method {method!r}; use 'stoc' or 'fd'")
            for l, H in enumerate(instance.generators):
                out[k, l, j] = -np.real(np.trace(drho @ H))
    return out


def cfim_from_quench(X, dX, floor: float = 1e-10, metadata: dict | None = None) -> FisherMatrix:
    """F_ij = sum_{kl, |X_kl| > floor} d_i X_kl d_j X_kl / |X_kl|."""
    X = np.asarray(getattr(X, "entries", X), dtype=float)
    dX = np.asarray(dX, dtype=float)
    absX = np.abs(X)
    keep = absX > floor
    if not keep.any():
        raise ValueError("every |X_kl| is below the floor; the instance carries no information")
    w = np.where(keep, 1.0 / np.where(keep, absX, 1.0), 0.0)
    F = np.einsum("kl,kli,klj->ij", w, dX, dX)
    return FisherMatrix((F + F.T) / 2, "classical", cutoff=floor, metadata=metadata or {})


def quench_cfim(
    instance: QuenchInstance,
    deriv_method: str,
    cfg: StocConfig | None = None,
    eps: float = 1e-5,
    floor: float = 1e-10,
    stream: tuple = (),
    workers: int = 1,
) -> FisherMatrix:
    dX = quench_derivatives(instance, deriv_method, cfg, eps, stream, workers)
    return cfim_from_quench(build_X(instance), dX, floor, metadata={"method": deriv_method, "p": instance.p})


def scaling_curves(p_range, anchor: float) -> tuple[np.ndarray, np.ndarray]:
    """SQL ~ 1/p and HL ~ 1/p^2 reference curves equal to ``anchor`` at the first p."""
    p = np.asarray(list(p_range), dtype=float)
    if p.size == 0:
        raise ValueError("p_range is empty")
    sql = anchor * p[0] / p
    hl = anchor * (p[0] / p) ** 2
    return sql, hl
