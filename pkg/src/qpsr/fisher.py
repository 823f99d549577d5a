"""Quantum and classical Fisher information matrices and Cramer-Rao bounds."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularFisherError
from .qcore import TOL, as_state

MAX_CONDITION = 1e12


@dataclass(frozen=True)
class FisherMatrix:
    entries: np.ndarray
    kind: str = "quantum"
    cutoff: float | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        F = np.atleast_2d(np.asarray(self.entries, dtype=float))
        if F.ndim != 2 or F.shape[0] != F.shape[1]:
            raise ValueError(f"Fisher matrix must be square, got shape {F.shape}")
        if self.kind not in ("quantum", "classical"):
            raise ValueError(f"kind must be 'quantum' or 'classical', got {self.kind!r}")
        asym = np.max(np.abs(F - F.T), initial=0.0)
        if asym > TOL.fisher_symmetry:
            raise ValueError(f"Fisher matrix not symmetric (max asymmetry {asym:.3e})")
        lo = np.linalg.eigvalsh(F)[0]
        if lo < -TOL.fisher_psd:
            raise ValueError(f"Fisher matrix not positive semidefinite (eigenvalue {lo:.3e})")
        object.__setattr__(self, "entries", F)

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    def inverse(self) -> np.ndarray:
        """F^-1 through the eigendecomposition, guarded by the condition number."""
        w, V = np.linalg.eigh(self.entries)
        top = max(w[-1], 0.0)
        cond = np.inf if w[0] <= 0 else top / w[0]
        if top == 0.0 or cond > MAX_CONDITION:
            raise SingularFisherError(
                f"{self.kind} Fisher matrix is singular (condition {cond:.3e}); "
                f"parameter direction {np.round(V[:, 0], 6).tolist()} is not identifiable",
                null_direction=V[:, 0],
                condition=cond,
            )
        return (V / w) @ V.T

    def trace_inverse(self) -> float:
        return float(np.trace(self.inverse()))

    def crb(self, M: int = 1) -> float:
        return crb(self, M)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "d": self.d,
                "entries": self.entries.ravel().tolist(),
                "cutoff": self.cutoff,
                "metadata": self.metadata,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> FisherMatrix:
        obj = json.loads(text)
        d = int(obj["d"])
        return cls(
            entries=np.asarray(obj["entries"], dtype=float).reshape(d, d),
            kind=obj["kind"],
            cutoff=obj.get("cutoff"),
            metadata=obj.get("metadata") or {},
        )


def _symmetric(Q) -> np.ndarray:
    Q = np.asarray(Q, dtype=float)
    return (Q + Q.T) / 2


def qfim_pure(psi, dpsis, metadata: dict | None = None) -> FisherMatrix:
    """Q_kl = 4 Re[<d_k psi|d_l psi> - <d_k psi|psi><psi|d_l psi>]."""
    psi = as_state(psi)
    D = np.array([np.asarray(v, dtype=complex) for v in dpsis])
    if D.ndim != 2 or D.shape[1] != psi.shape[0]:
        raise ValueError(f"derivative vectors have shape {D.shape}, state has dimension {psi.shape[0]}")
    gram = D.conj() @ D.T
    overlap = D.conj() @ psi
    Q = 4 * np.real(gram - np.outer(overlap, overlap.conj()))
    return FisherMatrix(_symmetric(Q), "quantum", metadata=metadata or {})


def qfim_pure_from_raw(psi, sums, metadata: dict | None = None) -> FisherMatrix:
    """QFIM straight from the raw shift-rule sums Psi_j.

    Q_kl = t^2 / (N^2 sin^2(t mu)) Re[<Psi_k|Psi_l> - <Psi_k|psi><psi|Psi_l>].
    All sums must come from runs with the same (t, mu, N).
    """
    psi = as_state(psi)
    sums = list(sums)
    if not sums:
        raise ValueError("need at least one raw sum")
    t, mu, N = sums[0].t, sums[0].mu, sums[0].N
    for s in sums[1:]:
        if (s.t, s.mu, s.N) != (t, mu, N):
            raise ValueError(f"mismatched sampling metadata: {(s.t, s.mu, s.N)} vs {(t, mu, N)}")
    P = np.array([s.vector for s in sums])
    if P.shape[1] != psi.shape[0]:
        raise ValueError("raw sums and state have different dimensions")
    pref = t**2 / (N**2 * np.sin(t * mu) ** 2)
    overlap = P.conj() @ psi
    Q = pref * np.real(P.conj() @ P.T - np.outer(overlap, overlap.conj()))
    meta = {"t": t, "mu": mu, "N": N, **(metadata or {})}
    return FisherMatrix(_symmetric(Q), "quantum", metadata=meta)


def _eig_pairs(rho, cutoff):
    p, V = np.linalg.eigh(np.asarray(rho, dtype=complex))
    denom = p[:, None] + p[None, :]
    keep = denom > cutoff
    return p, V, np.where(keep, denom, 1.0), keep


def qfim_mixed(rho, drhos, cutoff: float = 1e-12, metadata: dict | None = None) -> FisherMatrix:
    """Q_kl = 2 sum_{p_a + p_b > cutoff} <a|d_k rho|b><b|d_l rho|a> / (p_a + p_b)."""
    p, V, denom, keep = _eig_pairs(rho, cutoff)
    A = np.array([V.conj().T @ np.asarray(d, dtype=complex) @ V for d in drhos])
    if A.shape[1:] != V.shape:
        raise ValueError("derivative matrices and state have different dimensions")
    W = np.where(keep, 2.0 / denom, 0.0)
    # <a|d_k|b><b|d_l|a> = A_k[a,b] * A_l[b,a]
    Q = np.real(np.einsum("kab,lba,ab->kl", A, A, W))
    return FisherMatrix(_symmetric(Q), "quantum", cutoff=cutoff, metadata=metadata or {})


def sld(rho, drho, cutoff: float = 1e-12) -> np.ndarray:
    """Symmetric logarithmic derivative L with 2 d rho = L rho + rho L on the support."""
    p, V, denom, keep = _eig_pairs(rho, cutoff)
    A = V.conj().T @ np.asarray(drho, dtype=complex) @ V
    L = np.where(keep, 2.0 * A / denom, 0.0)
    return V @ L @ V.conj().T


def projective_probabilities(rho, drhos, basis) -> tuple[np.ndarray, np.ndarray]:
    """Outcome probabilities and their derivatives for a projective measurement.

    ``basis`` columns are the measurement vectors.
    """
    B = np.asarray(basis, dtype=complex)
    probs = np.real(np.einsum("ia,ij,ja->a", B.conj(), rho, B))
    dprobs = np.array([np.real(np.einsum("ia,ij,ja->a", B.conj(), d, B)) for d in drhos])
    return probs, dprobs


def cfim(probs, dprobs, floor: float = 1e-12, metadata: dict | None = None) -> FisherMatrix:
    """F_kl = sum_x d_k p(x) d_l p(x) / max(p(x), floor)."""
    p = np.asarray(probs, dtype=float)
    dp = np.atleast_2d(np.asarray(dprobs, dtype=float))
    if dp.shape[1] != p.shape[0]:
        raise ValueError(f"dprobs shape {dp.shape} does not match {p.shape[0]} outcomes")
    if np.min(p) < -1e-10:
        raise ValueError(f"negative probability {np.min(p):.3e}")
    if abs(p.sum() - 1) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum()!r}")
    if np.max(np.abs(dp.sum(axis=1))) > 1e-9:
        raise ValueError("probability derivatives must sum to zero")
    F = (dp / np.maximum(p, floor)) @ dp.T
    return FisherMatrix(_symmetric(F), "classical", cutoff=floor, metadata=metadata or {})


def crb(F: FisherMatrix, M: int = 1) -> float:
    """Total-variance bound tr[F^-1] / M."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    return F.trace_inverse() / M
