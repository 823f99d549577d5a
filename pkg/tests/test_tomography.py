import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpsr.derivatives import StocConfig
from qpsr.tomography import (
    QuenchInstance,
    QuenchMatrix,
    build_X,
    cfim_from_quench,
    ising2_generators,
    make_instance,
    quench_cfim,
    quench_derivatives,
    scaling_curves,
    solve_couplings,
)

X_TRUE = np.ones(3) / np.sqrt(3)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_exact_rows_annihilate_couplings(seed, p):
    inst = make_instance(ising2_generators(), X_TRUE, 1.0, p, seed)
    X = build_X(inst)
    assert np.max(np.abs(X.entries @ X_TRUE)) < 1e-9
    fit = solve_couplings(X)
    assert abs(fit.x @ X_TRUE) > 0.999


def test_instance_rejects_inexact_pairs():
    inst = make_instance(ising2_generators(), X_TRUE, 1.0, 2, 0)
    r0, rt = inst.pairs[0]
    with pytest.raises(ValueError):
        QuenchInstance(inst.generators, X_TRUE, 1.0, ((r0, r0 * 0.9 + rt * 0.1),))


def test_solve_couplings_edge_cases():
    with pytest.raises(ValueError):
        solve_couplings(QuenchMatrix(np.ones((1, 3))))
    fit = solve_couplings(QuenchMatrix(np.zeros((3, 3))))
    assert fit.degenerate


def test_quench_derivative_methods_agree():
    inst = make_instance(ising2_generators(), X_TRUE, 1.0, 4, 5)
    fd = quench_derivatives(inst, "fd")
    st_ = quench_derivatives(inst, "stoc", StocConfig(N=4000, seed=1, t=1.0))
    assert np.max(np.abs(fd - st_)) < 0.05
    with pytest.raises(ValueError):
        quench_derivatives(inst, "stoc", StocConfig(t=2.0))
    with pytest.raises(ValueError):
        quench_derivatives(inst, "bogus")


def test_cfim_from_quench_formula():
    X = np.array([[0.5, -0.25]])
    dX = np.array([[[1.0, 0.0], [0.0, 2.0]]])
    F = cfim_from_quench(X, dX).entries
    assert np.allclose(F, np.diag([1 / 0.5, 4 / 0.25]))
    with pytest.raises(ValueError):
        cfim_from_quench(np.zeros((1, 2)), dX)


def test_quench_cfim_is_valid_fisher():
    inst = make_instance(ising2_generators(), X_TRUE, 1.0, 6, 2)
    F = quench_cfim(inst, "fd")
    assert F.kind == "classical" and F.metadata["p"] == 6
    assert F.trace_inverse() > 0


def test_scaling_curves_anchor():
    sql, hl = scaling_curves(range(2, 6), 3.0)
    assert sql[0] == hl[0] == 3.0
    assert np.allclose(sql * np.arange(2, 6), 6.0)
    assert np.allclose(hl * np.arange(2, 6) ** 2, 12.0)
