"""Derivative engines for evolved probe states.

* ``stoc``  -- time-dependent stochastic parameter-shift rule (mixed and pure)
* ``stand`` -- standard parameter-shift rule through a Trotterized evolution
* ``fd``    -- central finite differences of the exactly evolved state
* ``exact`` -- -i U [Y_j, rho0] U^dag with Y_j from quadrature

The stochastic rule needs shift generators that square to the identity.
:func:`shift_terms` rewrites an arbitrary derivative generator as a
weighted sum of such involutions; the identity component is dropped because
it commutes with every state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._pool import ordered_map
from .errors import InvalidShiftError
from .hamiltonian import exact_Yj
from .noise import KrausChannel, apply_channel_all
from .qcore import (
    SIGMA_X,
    SIGMA_Z,
    TOL,
    as_density,
    as_state,
    check_hermitian,
    commutator,
    density,
    evolve,
    expm_hermitian,
    num_qubits,
    pauli_decompose,
    pauli_word,
)

METHODS = ("stoc", "stand", "fd", "exact")

# Fixed chunk size: the reduction order must not depend on the worker count.
_CHUNK = 1024


@dataclass(frozen=True)
class StocConfig:
    N: int = 1000
    mu: float = np.pi / 4
    seed: int = 0
    t: float = 1.0

    def check(self, rule: str = "mixed") -> None:
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        theta = self.t * self.mu
        if rule == "mixed":
            den, where = np.sin(2 * theta), "pi/2"
        elif rule == "pure":
            den, where = np.sin(theta), "pi"
        else:
            raise ValueError(f"unknown rule {rule!r}")
        if abs(den) <= TOL.shift_denominator:
            raise InvalidShiftError(
                f"t*mu = {theta!r} is a multiple of {where}; the {rule}-state shift rule is undefined there"
            )


@dataclass(frozen=True)
class DerivativeEstimate:
    """An estimate of d rho / d phi_j (matrix) or d|psi>/d phi_j (vector).

    ``stderr`` holds the Monte-Carlo standard error per entry, with the real
    part of ``stderr`` belonging to the real part of ``value`` and likewise
    for the imaginary part.  Deterministic methods leave it ``None``.
    """

    value: np.ndarray
    method: str
    stderr: np.ndarray | None = None
    N: int | None = None
    mu: float | None = None
    seed: int | None = None
    t: float | None = None


@dataclass(frozen=True)
class PsiSum:
    """Raw accumulated sum_n (|psi+_n> - |psi-_n>) of the pure-state rule."""

    vector: np.ndarray
    t: float
    mu: float
    N: int

    @property
    def prefactor(self) -> float:
        return self.t / (2 * self.N * np.sin(self.t * self.mu))

    def derivative(self) -> np.ndarray:
        return self.prefactor * self.vector


def shift_commutator(O, rho, theta: float) -> np.ndarray:
    """[O, rho] from two conjugations by exp(-/+ i theta O); requires O @ O == I."""
    O = check_hermitian(O)
    rho = np.asarray(rho, dtype=complex)
    resid = np.max(np.abs(O @ O - np.eye(O.shape[0])))
    if resid > TOL.involution:
        raise ValueError(f"shift generator must square to the identity (residual {resid:.3e})")
    den = np.sin(2 * theta)
    if abs(den) <= TOL.shift_denominator:
        raise InvalidShiftError(f"sin(2*theta) vanishes at theta={theta!r}")
    minus = expm_hermitian(O, theta)  # exp(-i theta O)
    plus = minus.conj().T
    return 1j / den * (minus @ rho @ plus - plus @ rho @ minus)


def shift_terms(G, tol: float = TOL.involution) -> list[tuple[float, np.ndarray]]:
    """Write G = c0 * I + sum_k c_k O_k with every O_k @ O_k = I.

    Returns ``[(c_k, O_k), ...]``.  Uses G itself when it is already an
    involution, a rescaled copy when G has exactly two distinct eigenvalues
    (e.g. a projector), and a Pauli-word expansion otherwise.
    """
    G = check_hermitian(G)
    dim = G.shape[0]
    eye = np.eye(dim)
    if np.max(np.abs(G @ G - eye)) <= tol:
        return [(1.0, G)]
    w = np.linalg.eigvalsh(G)
    lo, hi = w[0], w[-1]
    if hi - lo > tol and np.all(np.minimum(np.abs(w - lo), np.abs(w - hi)) <= tol):
        half = (hi - lo) / 2
        return [(float(half), (G - (hi + lo) / 2 * eye) / half)]
    try:
        num_qubits(dim)
    except ValueError as exc:
        raise ValueError("generator has no involutive decomposition (not a qubit operator)") from exc
    return [
        (float(c.real), pauli_word(label))
        for label, c in pauli_decompose(G).items()
        if set(label) != {"i"}
    ]


def sample_times(cfg: StocConfig, stream: tuple = ()) -> np.ndarray:
    """Split times s_n = t * u_n with u_n ~ U[0, 1), keyed by (seed, *stream)."""
    rng = np.random.default_rng([int(cfg.seed), *(int(k) for k in stream)])
    return cfg.t * rng.random(int(cfg.N))


def _propagators(w, V, times):
    return (V[None] * np.exp(-1j * times[:, None] * w)[:, None, :]) @ V.conj().T


def _pair_differences(H, terms, t, theta, s, state, channel):
    """Per-sample sum_k c_k (X+ - X-) where X is |psi> or rho after the shifted circuit."""
    w, V = np.linalg.eigh(H)
    first = _propagators(w, V, s)
    last = _propagators(w, V, t - s)
    if state.ndim == 1:
        a = np.einsum("nij,j->ni", first, state)
        out = np.zeros_like(a)
        for c, O in terms:
            minus = expm_hermitian(O, theta)
            plus = minus.conj().T
            out += c * np.einsum("nij,nj->ni", last, a @ minus.T - a @ plus.T)
        return out
    lastH = np.conj(np.swapaxes(last, -1, -2))
    a = first @ state @ np.conj(np.swapaxes(first, -1, -2))
    out = np.zeros_like(a)
    for c, O in terms:
        minus = expm_hermitian(O, theta)
        plus = minus.conj().T
        rp = last @ (minus @ a @ plus) @ lastH
        rm = last @ (plus @ a @ minus) @ lastH
        if channel is not None:
            rp = apply_channel_all(channel, rp)
            rm = apply_channel_all(channel, rm)
        out += c * (rp - rm)
    return out


def _stoc_sums(model, state, j, phi, cfg, channel, stream, workers):
    H = model.assemble(phi)
    terms = shift_terms(model.deriv_generator(j, phi))
    s = sample_times(cfg, (*stream, j))
    theta = cfg.t * cfg.mu

    def chunk(lo):
        d = _pair_differences(H, terms, cfg.t, theta, s[lo : lo + _CHUNK], state, channel)
        return d.sum(axis=0), (d.real**2).sum(axis=0), (d.imag**2).sum(axis=0)

    parts = ordered_map(chunk, range(0, len(s), _CHUNK), workers)
    total = np.zeros(state.shape, dtype=complex)
    sq_re = np.zeros(state.shape)
    sq_im = np.zeros(state.shape)
    for tot, re2, im2 in parts:
        total += tot
        sq_re += re2
        sq_im += im2
    return total, sq_re, sq_im


def _stderr(total, sq_re, sq_im, N, scale):
    if N < 2:
        return np.full(total.shape, np.nan + 1j * np.nan)
    var_re = np.maximum(sq_re - total.real**2 / N, 0.0) / (N - 1)
    var_im = np.maximum(sq_im - total.imag**2 / N, 0.0) / (N - 1)
    return abs(scale) * (np.sqrt(var_re / N) + 1j * np.sqrt(var_im / N))


def stoc_psr_mixed(
    model,
    rho0,
    j: int,
    phi,
    cfg: StocConfig,
    channel: KrausChannel | None = None,
    stream: tuple = (),
    workers: int = 1,
) -> DerivativeEstimate:
    """Stochastic parameter-shift estimate of d rho(phi) / d phi_j.

    Each of the N samples draws a split time s, evolves rho0 for time s,
    applies exp(-/+ i t mu O) for every involution O of the derivative
    generator, evolves for t - s, and (optionally) passes both branches
    through ``channel`` on every qubit.  The estimate is
    t / (N sin(2 t mu)) * sum_n (rho+_n - rho-_n).
    """
    cfg.check("mixed")
    rho0 = as_density(density(rho0))
    total, sq_re, sq_im = _stoc_sums(model, rho0, j, phi, cfg, channel, stream, workers)
    scale = cfg.t / np.sin(2 * cfg.t * cfg.mu)
    N = int(cfg.N)
    return DerivativeEstimate(
        value=scale * total / N,
        method="stoc",
        stderr=_stderr(total, sq_re, sq_im, N, scale),
        N=N,
        mu=cfg.mu,
        seed=cfg.seed,
        t=cfg.t,
    )


def stoc_psr_pure(
    model, psi0, j: int, phi, cfg: StocConfig, stream: tuple = (), workers: int = 1
) -> tuple[DerivativeEstimate, PsiSum]:
    """Pure-state rule: d|psi>/d phi_j ~ t / (2 N sin(t mu)) * sum_n (|psi+_n> - |psi-_n>)."""
    cfg.check("pure")
    psi0 = as_state(psi0)
    total, sq_re, sq_im = _stoc_sums(model, psi0, j, phi, cfg, None, stream, workers)
    N = int(cfg.N)
    raw = PsiSum(vector=total, t=cfg.t, mu=cfg.mu, N=N)
    scale = cfg.t / (2 * np.sin(cfg.t * cfg.mu))
    est = DerivativeEstimate(
        value=raw.derivative(),
        method="stoc",
        stderr=_stderr(total, sq_re, sq_im, N, scale),
        N=N,
        mu=cfg.mu,
        seed=cfg.seed,
        t=cfg.t,
    )
    return est, raw


def trotter_unitary(x: float, z: float, m: int) -> np.ndarray:
    """(exp(-i x/2 sigma_x) exp(-i z/2 sigma_z))^m."""
    step = expm_hermitian(SIGMA_X, x / 2) @ expm_hermitian(SIGMA_Z, z / 2)
    return np.linalg.matrix_power(step, m)


def _check_trotter_order(m: int) -> None:
    if m < 5 or m % 4 != 1:
        raise ValueError(f"Trotter order must be 4k+1 with k >= 1, got m={m}")


def trotter_state(psi0, phi: float, t: float, m: int = 5) -> np.ndarray:
    _check_trotter_order(m)
    x, z = 2 * t * np.cos(phi) / m, 2 * t * np.sin(phi) / m
    return trotter_unitary(x, z, m) @ as_state(psi0)


def stand_psr_trotter(psi0, phi: float, t: float, m: int = 5) -> DerivativeEstimate:
    """Standard shift rule on the m-step Trotterized field-angle evolution.

    Shifting x (or z) by pi turns every Trotter factor's rotation into
    -i sigma_x (or -i sigma_z) times itself, which for m = 4k+1 stands in
    for the derivative prefactor.  Returns t[-sin(phi) dx + cos(phi) dz].
    """
    _check_trotter_order(m)
    psi0 = as_state(psi0)
    x, z = 2 * t * np.cos(phi) / m, 2 * t * np.sin(phi) / m
    dx = trotter_unitary(x + np.pi, z, m) @ psi0
    dz = trotter_unitary(x, z + np.pi, m) @ psi0
    return DerivativeEstimate(value=t * (-np.sin(phi) * dx + np.cos(phi) * dz), method="stand", t=t)


def _shifted(phi, j, delta):
    phi = np.atleast_1d(np.array(phi, dtype=float))
    phi[j] += delta
    return phi


def finite_difference(
    model, state, j: int, phi, t: float, eps: float = 1e-5, channel: KrausChannel | None = None
) -> DerivativeEstimate:
    """Central difference of the (optionally channel-filtered) evolved state."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    state = np.asarray(state, dtype=complex)
    if channel is not None:
        state = density(state)

    def f(p):
        out = evolve(model.unitary(t, p), state)
        return out if channel is None else apply_channel_all(channel, out)

    value = (f(_shifted(phi, j, eps)) - f(_shifted(phi, j, -eps))) / (2 * eps)
    return DerivativeEstimate(value=value, method="fd", t=t)


def exact_derivative(
    model, state, j: int, phi, t: float, quad_steps: int = 2001, channel: KrausChannel | None = None
) -> DerivativeEstimate:
    """-i U Y_j |psi0> for vectors, -i U [Y_j, rho0] U^dag for matrices."""
    state = np.asarray(state, dtype=complex)
    Y = exact_Yj(model, t, phi, j, quad_steps)
    U = model.unitary(t, phi)
    if state.ndim == 1 and channel is None:
        return DerivativeEstimate(value=-1j * U @ (Y @ state), method="exact", t=t)
    value = -1j * evolve(U, commutator(Y, density(state)))
    if channel is not None:
        value = apply_channel_all(channel, value)
    return DerivativeEstimate(value=value, method="exact", t=t)
