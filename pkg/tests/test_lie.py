import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamdist import config
from hamdist.errors import DimensionError, NotHermitian, NotTraceless
from hamdist.lie import (PAULI_X, PAULI_Y, PAULI_Z, ad_action, build_basis, commutator, expm_i,
                         from_coords, random_hermitian, to_coords, traceless_part)

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 4)


def test_basis_n2_is_pauli_up_to_sign():
    B = build_basis(2)
    assert B.labels == ("D1", "X12", "Y12")
    np.testing.assert_array_equal(B["D1"], PAULI_Z)
    np.testing.assert_array_equal(B["X12"], PAULI_X)
    # i at (1,2), -i at (2,1) is minus the usual sigma_y
    np.testing.assert_array_equal(B["Y12"], -PAULI_Y)


def test_basis_n3_elements():
    B = build_basis(3)
    assert B.labels == ("D1", "D2", "X12", "X13", "X23", "Y12", "Y13", "Y23")
    np.testing.assert_array_equal(B["D1"], np.diag([1, -1, 0]))
    np.testing.assert_array_equal(B["D2"], np.diag([0, 1, -1]))
    Y13 = np.zeros((3, 3), dtype=complex)
    Y13[0, 2], Y13[2, 0] = 1j, -1j
    np.testing.assert_array_equal(B["Y13"], Y13)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_basis_size_and_invariants(n):
    B = build_basis(n)
    assert len(B) == n * n - 1
    for E in B:
        np.testing.assert_allclose(E, E.conj().T, atol=0)
        assert np.trace(E) == 0
    assert abs(np.linalg.det(B.gram)) > 0
    assert np.isfinite(np.linalg.cond(B.gram))


def test_basis_rejects_small_n():
    with pytest.raises(DimensionError):
        build_basis(1)


def test_coords_of_basis_element_and_zero():
    B = build_basis(2)
    np.testing.assert_allclose(to_coords(PAULI_X, B), [0, 1, 0], atol=1e-15)
    np.testing.assert_array_equal(to_coords(np.zeros((2, 2)), B), np.zeros(3))


def test_coords_diag_n3():
    # diag(1,0,-1) = D1 + D2 by inspection of diag(a, b - a, -b)
    c = to_coords(np.diag([1.0, 0.0, -1.0]), build_basis(3))
    np.testing.assert_allclose(c, [1, 1, 0, 0, 0, 0, 0, 0], atol=1e-14)


def test_coords_errors():
    with pytest.raises(NotTraceless):
        to_coords(np.eye(2), build_basis(2))
    with pytest.raises(DimensionError):
        to_coords(np.zeros((3, 3)), build_basis(2))
    with pytest.raises(NotHermitian):
        to_coords(np.array([[0, 1], [0, 0]]), build_basis(2))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_coords_round_trip(n):
    B = build_basis(n)
    rng = np.random.default_rng(n)
    for i, E in enumerate(B):
        np.testing.assert_allclose(to_coords(E, B), np.eye(len(B))[i], atol=1e-12)
    for _ in range(100):
        H = random_hermitian(n, rng, traceless=True)
        assert np.max(np.abs(from_coords(to_coords(H, B), B) - H)) <= 1e-12


def test_commutator_examples():
    np.testing.assert_array_equal(commutator(PAULI_Z, PAULI_Z), np.zeros((2, 2)))
    np.testing.assert_allclose(commutator(PAULI_Z, PAULI_X), 2j * PAULI_Y)
    with pytest.raises(DimensionError):
        commutator(PAULI_Z, np.eye(3))


def test_ad_action_examples():
    np.testing.assert_allclose(ad_action(PAULI_Z, PAULI_X), -2 * PAULI_Y)
    G = np.diag([2.0, -1, -1])
    np.testing.assert_array_equal(ad_action(G, G), np.zeros((3, 3)))
    B = build_basis(2)
    np.testing.assert_allclose(ad_action(np.diag([1.0, -1.0]), B["X12"]), 2 * B["Y12"])
    np.testing.assert_allclose(ad_action(PAULI_Z, PAULI_X), 1j * commutator(PAULI_Z, PAULI_X))


@settings(max_examples=50, deadline=None)
@given(seeds, dims)
def test_commutator_antisymmetric(seed, n):
    rng = np.random.default_rng(seed)
    A, B = random_hermitian(n, rng), random_hermitian(n, rng)
    C = commutator(A, B)
    np.testing.assert_allclose(C, -commutator(B, A), atol=1e-12)
    assert np.max(np.abs(C.conj().T + C)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(seeds, dims)
def test_ad_action_hermitian_traceless(seed, n):
    rng = np.random.default_rng(seed)
    A, B = random_hermitian(n, rng), random_hermitian(n, rng)
    X = ad_action(A, B)
    assert np.max(np.abs(X - X.conj().T)) <= 1e-12
    assert abs(np.trace(X)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(seeds, dims)
def test_jacobi(seed, n):
    rng = np.random.default_rng(seed)
    A, B, C = (random_hermitian(n, rng) for _ in range(3))
    lhs = ad_action(A, ad_action(B, C)) - ad_action(B, ad_action(A, C))
    assert np.max(np.abs(lhs - ad_action(ad_action(A, B), C))) <= 1e-10


def test_expm_examples():
    np.testing.assert_allclose(expm_i(PAULI_Z, 0.0), np.eye(2), atol=1e-15)
    np.testing.assert_allclose(expm_i(PAULI_Z, np.pi / 2), np.diag([1j, -1j]), atol=1e-15)
    with pytest.raises(NotHermitian):
        expm_i(np.array([[0, 1], [0, 0]]), 1.0)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_expm_diagonal_family_gives_orthogonal_states(n):
    D = np.diag(np.arange(1, n + 1)).astype(complex)
    psi = np.ones(n) / np.sqrt(n)
    states = np.array([expm_i(j * D, 2 * np.pi / n) @ psi for j in range(1, n + 1)])
    np.testing.assert_allclose(states.conj() @ states.T, np.eye(n), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(seeds, dims, st.floats(-3, 3), st.floats(-3, 3))
def test_expm_group_law_and_unitarity(seed, n, s, t):
    H = random_hermitian(n, np.random.default_rng(seed))
    U = expm_i(H, s)
    assert np.max(np.abs(U @ expm_i(H, t) - expm_i(H, s + t))) <= 1e-10
    assert np.max(np.abs(U.conj().T @ U - np.eye(n))) <= 1e-10


def test_traceless_part():
    np.testing.assert_array_equal(traceless_part(np.eye(3)), np.zeros((3, 3)))
    n = 4
    D = np.diag(np.arange(1.0, n + 1))
    np.testing.assert_allclose(traceless_part(D), D - (n + 1) / 2 * np.eye(n))
    np.testing.assert_array_equal(traceless_part(PAULI_X), PAULI_X)


def test_tolerances_are_overridable():
    slightly_off = PAULI_X + np.array([[0, 1e-11], [0, 0]])
    with pytest.raises(NotHermitian):
        expm_i(slightly_off, 1.0)
    with config.tolerances(hermitian=1e-9):
        expm_i(slightly_off, 1.0)
    assert config.TOL.hermitian == 1e-12
