import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qduality import measures as M
from qduality.errors import NotPositive, UnknownMeasure
from qduality.states import basis_state, maximally_mixed, pure_state, random_state, random_states, werner_ququart

from conftest import QUTRIT, oracle_sqrt


def test_frozen_qutrit_values():
    # reference values computed with numpy's LAPACK eigh and direct formulas
    assert M.c_hs(QUTRIT) == pytest.approx(0.125, abs=1e-12)
    assert M.c_wy(QUTRIT) == pytest.approx(0.0924255982866238, abs=1e-10)
    assert M.c_l1(QUTRIT) == pytest.approx(0.747213595499958, abs=1e-12)
    assert M.p_hs_linear(QUTRIT) == pytest.approx(0.046666666666666634, abs=1e-12)
    assert M.p_hs_vn(QUTRIT) == pytest.approx(0.06895927460353612, abs=1e-12)
    assert M.p_l1(QUTRIT) == pytest.approx(0.10304985016820511, abs=1e-12)
    upsilon, omega = M.wy_bounds(QUTRIT)
    assert upsilon == pytest.approx(1.7179863078014153, abs=1e-10)
    assert omega == pytest.approx(1.973952662819615, abs=1e-10)


@pytest.mark.parametrize("d", [2, 3, 5, 8])
def test_variants_agree(d):
    rhos = random_states(d, 100, seed=17)
    S = oracle_sqrt(rhos)
    np.testing.assert_allclose(M.c_hs(rhos, "basis"), M.c_hs(rhos), atol=1e-12)
    for v in ("commutator", "sqrt_diag", "basis"):
        np.testing.assert_allclose(M.c_wy(rhos, v), M.c_wy(rhos), atol=1e-10)
    np.testing.assert_allclose(M.c_wy(rhos), np.sum(np.abs(S) ** 2, axis=(1, 2)) - np.sum(np.abs(np.diagonal(S, axis1=1, axis2=2)) ** 2, axis=1), atol=1e-10)
    np.testing.assert_allclose(M.p_hs_linear(rhos, "entropy"), M.p_hs_linear(rhos), atol=1e-13)
    np.testing.assert_allclose(M.p_hs_vn(rhos, "entropy"), M.p_hs_vn(rhos), atol=1e-12)


def test_unknown_variants():
    with pytest.raises(UnknownMeasure):
        M.c_hs(QUTRIT, "nope")
    with pytest.raises(UnknownMeasure):
        M.c_wy(QUTRIT, "nope")
    with pytest.raises(UnknownMeasure):
        M.population_bound(QUTRIT, "nope")


@pytest.mark.parametrize("d", [2, 4, 7])
def test_basis_state_extremes(d):
    rho = basis_state(0, d)
    assert M.c_hs(rho) == 0 and M.c_l1(rho) == 0
    assert M.c_wy(rho) == pytest.approx(0, abs=1e-12)
    assert M.p_hs_linear(rho) == pytest.approx((d - 1) / d)
    assert M.p_hs_vn(rho) == pytest.approx(np.log(d))
    assert M.p_l1(rho) == pytest.approx(d - 1)


@pytest.mark.parametrize("d", [2, 4, 7])
def test_uniform_pure_state_extremes(d):
    phases = np.exp(2j * np.pi * np.arange(d) / 7.3)
    rho = pure_state(phases)
    assert M.c_hs(rho) == pytest.approx((d - 1) / d)
    assert M.c_wy(rho) == pytest.approx((d - 1) / d, abs=1e-8)
    assert M.c_l1(rho) == pytest.approx(d - 1)
    for p in (M.p_hs_linear, M.p_hs_vn, M.p_l1):
        assert p(rho) == pytest.approx(0, abs=1e-12)


def test_maximally_mixed_is_zero():
    rho = maximally_mixed(4)
    for fn in (M.c_hs, M.c_wy, M.c_l1, M.p_hs_linear, M.p_hs_vn, M.p_l1):
        assert fn(rho) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("a", [0.0, 0.1, 0.5, 0.9, 1.0])
def test_werner_pure_closed_forms(a):
    rho = werner_ququart(1.0, a)
    assert M.c_hs(rho) == pytest.approx(2 * a * (1 - a), abs=1e-14)
    assert M.p_hs_linear(rho) == pytest.approx(0.75 - 2 * a * (1 - a), abs=1e-14)
    assert M.c_l1(rho) == pytest.approx(2 * np.sqrt(a * (1 - a)), abs=1e-14)


def test_werner_half():
    rho = werner_ququart(1.0, 0.5)
    assert M.c_hs(rho) == pytest.approx(0.5)
    assert M.p_hs_linear(rho) == pytest.approx(0.25)


def test_entropies():
    assert M.von_neumann_entropy(np.eye(4) / 4) == pytest.approx(np.log(4))
    assert M.linear_entropy(np.eye(4) / 4) == pytest.approx(0.75)
    assert M.von_neumann_entropy(basis_state(1, 3)) == pytest.approx(0, abs=1e-15)
    with pytest.raises(NotPositive):
        M.von_neumann_entropy(np.diag([1.1, -0.1]))
    with pytest.raises(NotPositive):
        M.vn_entropy_of([1.1, -0.1])


def test_measure_values_lists_every_variant():
    values = M.measure_values(QUTRIT)
    names = {(v.name, v.variant) for v in values}
    assert ("c_wy", "commutator") in names and ("c_hs", "basis") in names
    assert len(values) == 16


def test_upsilon_equals_sqrt_population_bound():
    rhos = random_states(5, 50, seed=4)
    upsilon, _ = M.wy_bounds(rhos)
    np.testing.assert_allclose(upsilon, M.population_bound(rhos, "wy"), atol=1e-12)


def test_qubit_predictability_as_squared_difference():
    rho = random_state(2, rng=8).matrix
    p = np.real(np.diag(rho))
    # (d-1)/d - S_l normalisation: half the squared population difference
    assert M.p_hs_linear(rho) == pytest.approx(0.5 * (p[0] - p[1]) ** 2, abs=1e-14)
    assert M.p_l1(rho) == pytest.approx((np.sqrt(p[0]) - np.sqrt(p[1])) ** 2, abs=1e-14)


@given(st.integers(2, 8), st.integers(0, 2 ** 40))
def test_inequality_chain(d, seed):
    rho = random_state(d, rng=seed).matrix
    p = np.real(np.diag(rho))
    s_l = M.linear_entropy_of(p)
    upsilon, omega = M.wy_bounds(rho)
    assert M.c_hs(rho) <= s_l + 1e-10
    assert s_l <= M.vn_entropy_of(p) + 1e-10
    assert M.c_wy(rho) <= upsilon + 1e-8
    assert upsilon <= omega + 1e-8
    assert M.c_l1(rho) + M.p_l1(rho) <= d - 1 + 1e-10
    assert M.c_hs(rho) + M.p_hs_linear(rho) <= (d - 1) / d + 1e-10


@given(st.integers(2, 6), st.integers(0, 2 ** 40))
def test_permutation_invariance(d, seed):
    rho = random_state(d, rng=seed).matrix
    perm = np.random.default_rng(seed).permutation(d)
    moved = rho[np.ix_(perm, perm)]
    for fn in (M.c_hs, M.c_l1, M.p_hs_linear, M.p_hs_vn, M.p_l1):
        assert fn(moved) == pytest.approx(fn(rho), abs=1e-12)
    assert M.c_wy(moved) == pytest.approx(M.c_wy(rho), abs=1e-9)
