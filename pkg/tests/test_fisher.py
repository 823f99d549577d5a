import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpsr.derivatives import exact_derivative
from qpsr.errors import SingularFisherError
from qpsr.fisher import (
    FisherMatrix,
    cfim,
    crb,
    projective_probabilities,
    qfim_mixed,
    qfim_pure,
    sld,
)
from qpsr.hamiltonian import FieldAngleModel, ParamHamiltonian, field_angle_qfi
from qpsr.qcore import collective_pauli, ghz, plus_state, random_density, random_hermitian


def test_field_angle_qfi_from_exact_derivative():
    for t in (0.3, 1.0, 2.2):
        psi = FieldAngleModel().unitary(t, 0.4) @ plus_state()
        d = exact_derivative(FieldAngleModel(), plus_state(), 0, 0.4, t).value
        assert qfim_pure(psi, [d]).entries[0, 0] == pytest.approx(field_angle_qfi(t, 0.4), abs=1e-9)


def test_qfim_mixed_equals_pure_on_pure_states():
    model = ParamHamiltonian(tuple(collective_pauli(a, 2) for a in "xyz"))
    phi, t = [0.3, 0.1, -0.2], 0.9
    psi0 = ghz(2)
    psi = model.unitary(t, phi) @ psi0
    dv = [exact_derivative(model, psi0, j, phi, t).value for j in range(3)]
    rho = np.outer(psi, psi.conj())
    dm = [np.outer(d, psi.conj()) + np.outer(psi, d.conj()) for d in dv]
    assert np.allclose(qfim_mixed(rho, dm).entries, qfim_pure(psi, dv).entries, atol=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4]))
def test_sld_equation(seed, dim):
    rng = np.random.default_rng(seed)
    rho = random_density(dim, rng)
    H = random_hermitian(dim, rng)
    drho = -1j * (H @ rho - rho @ H)
    L = sld(rho, drho)
    assert np.linalg.norm(2 * drho - L @ rho - rho @ L) <= 1e-8
    # Q = tr[rho L^2] for a single parameter
    q = qfim_mixed(rho, [drho]).entries[0, 0]
    assert q == pytest.approx(np.real(np.trace(rho @ L @ L)), abs=1e-9)


def test_cfim_bounded_by_qfim():
    model = FieldAngleModel()
    rho = model.unitary(1.0, 0.3) @ np.outer(plus_state(), plus_state().conj()) @ model.unitary(1.0, 0.3).conj().T
    d = exact_derivative(model, plus_state(), 0, 0.3, 1.0).value
    psi = model.unitary(1.0, 0.3) @ plus_state()
    drho = np.outer(d, psi.conj()) + np.outer(psi, d.conj())
    Q = qfim_mixed(rho, [drho]).entries[0, 0]
    for basis in (np.eye(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2)):
        p, dp = projective_probabilities(rho, [drho], basis)
        assert cfim(p, dp).entries[0, 0] <= Q + 1e-9
    # the SLD eigenbasis saturates the bound
    _, V = np.linalg.eigh(sld(rho, drho))
    p, dp = projective_probabilities(rho, [drho], V)
    assert cfim(p, dp).entries[0, 0] == pytest.approx(Q, rel=1e-6)


def test_fisher_matrix_validation_and_inverse():
    with pytest.raises(ValueError):
        FisherMatrix(np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        FisherMatrix(np.array([[1.0, 0.0], [0.0, -1.0]]))
    F = FisherMatrix(np.array([[2.0, 0.5], [0.5, 1.0]]))
    assert np.allclose(F.inverse() @ F.entries, np.eye(2))
    assert crb(F, M=4) == pytest.approx(np.trace(np.linalg.inv(F.entries)) / 4)
    with pytest.raises(ValueError):
        crb(F, M=0)


def test_singular_fisher_reports_null_direction():
    F = FisherMatrix(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(SingularFisherError) as info:
        F.trace_inverse()
    v = info.value.null_direction
    assert abs(abs(v @ np.array([1, -1]) / np.sqrt(2)) - 1) < 1e-9


def test_json_roundtrip():
    F = FisherMatrix(np.array([[2.0, 0.5], [0.5, 1.0]]), "classical", cutoff=1e-10, metadata={"p": 3})
    G = FisherMatrix.from_json(F.to_json())
    assert np.array_equal(F.entries, G.entries) and G.kind == "classical" and G.metadata == {"p": 3}
    assert json.loads(F.to_json())["d"] == 2


def test_cfim_checks_inputs():
    with pytest.raises(ValueError):
        cfim([0.5, 0.6], [[0.1, -0.1]])
    with pytest.raises(ValueError):
        cfim([0.5, 0.5], [[0.1, 0.1]])
