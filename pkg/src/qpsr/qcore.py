"""Dense linear algebra for few-qubit registers.

States are plain ``numpy`` arrays: a 1-d complex vector is a pure state, a
2-d square complex matrix is a density matrix or an operator.  Qubit 0 is the
leftmost tensor factor, so ``embed(op, 0, 3) == kron(op, I, I)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-12
    hermitian: float = 1e-10
    unitary: float = 1e-10
    psd: float = 1e-10
    involution: float = 1e-10
    fisher_symmetry: float = 1e-9
    fisher_psd: float = 1e-8
    shift_denominator: float = 1e-9


TOL = Tolerances()

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"i": I2, "x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


def num_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")


def is_hermitian(op: np.ndarray, tol: float = TOL.hermitian) -> bool:
    op = np.asarray(op)
    return op.ndim == 2 and op.shape[0] == op.shape[1] and np.max(np.abs(op - op.conj().T), initial=0.0) <= tol


def check_hermitian(op, tol: float = TOL.hermitian, name: str = "operator") -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {op.shape}")
    resid = np.max(np.abs(op - op.conj().T), initial=0.0)
    if resid > tol:
        raise ValueError(f"{name} is not Hermitian: max |A - A^dag| = {resid:.3e} > {tol:.0e}")
    return op


def as_state(psi, tol: float = TOL.norm) -> np.ndarray:
    """Validate a pure state vector and return it as a complex array."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError(f"state vector must be 1-d, got shape {psi.shape}")
    num_qubits(psi.shape[0])
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state vector norm is {norm!r}, expected 1")
    return psi


def as_density(rho, tol: float = TOL.norm, psd_tol: float = TOL.psd) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, no negative eigenvalues."""
    rho = check_hermitian(rho, tol=tol, name="density matrix")
    num_qubits(rho.shape[0])
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -psd_tol:
        raise ValueError(f"density matrix has eigenvalue {lo:.3e} < 0")
    return rho


def density(state) -> np.ndarray:
    """Pure state vector -> |psi><psi|; density matrices pass through."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def kron_all(ops) -> np.ndarray:
    return reduce(np.kron, ops)


def embed(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Single-qubit ``op`` acting on ``qubit`` of an ``n``-qubit register."""
    _check_n(n)
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for n={n}")
    return kron_all([op if k == qubit else I2 for k in range(n)])


def pauli_word(label: str) -> np.ndarray:
    """Tensor product of Paulis, e.g. ``pauli_word("xiz")``."""
    try:
        return kron_all([PAULI[c] for c in label.lower()])
    except KeyError as exc:
        raise ValueError(f"bad Pauli label {label!r}") from exc


def pauli_decompose(op: np.ndarray, tol: float = 1e-12) -> dict[str, complex]:
    """Coefficients c_w with op = sum_w c_w P_w over Pauli words.

    Terms with |c_w| <= tol are dropped.  For Hermitian input all
    coefficients are real (returned as complex for uniformity).
    """
    op = np.asarray(op, dtype=complex)
    n = num_qubits(op.shape[0])
    out = {}
    for letters in itertools.product("ixyz", repeat=n):
        label = "".join(letters)
        c = np.trace(pauli_word(label) @ op) / op.shape[0]
        if abs(c) > tol:
            out[label] = c
    return out


def collective_pauli(axis: str, n: int) -> np.ndarray:
    """sum_k sigma_axis^(k) over all n qubits."""
    _check_n(n)
    axis = axis.lower()
    if axis not in ("x", "y", "z"):
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    return sum(embed(PAULI[axis], k, n) for k in range(n))


def basis_state(index: int, n: int) -> np.ndarray:
    _check_n(n)
    psi = np.zeros(2**n, dtype=complex)
    psi[index] = 1.0
    return psi


def plus_state() -> np.ndarray:
    return np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)


def ghz(n: int) -> np.ndarray:
    """(|0...0> + |1...1>)/sqrt(2)."""
    _check_n(n)
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return psi


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def expm_hermitian(H, theta: float) -> np.ndarray:
    """exp(-i * theta * H) through the eigendecomposition of H."""
    H = check_hermitian(H)
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * theta * w)) @ V.conj().T


def is_unitary(U, tol: float = TOL.unitary) -> bool:
    U = np.asarray(U)
    return np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) <= tol


def evolve(U: np.ndarray, state: np.ndarray) -> np.ndarray:
    """U|psi> for a vector, U rho U^dag for a matrix (stacked matrices allowed)."""
    U = np.asarray(U, dtype=complex)
    state = np.asarray(state, dtype=complex)
    if state.shape[-1] != U.shape[0]:
        raise ValueError(f"dimension mismatch: operator {U.shape}, state {state.shape}")
    if state.ndim == 1:
        return U @ state
    return U @ state @ U.conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Hilbert-Schmidt random density matrix (Ginibre construction)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2
