import numpy as np
import pytest
from numpy.polynomial import Polynomial

from hamdist import config
from hamdist.errors import DecompositionResidual, DimensionError, NonzeroConstantTerm, NotTraceless
from hamdist.gadgets import weyl_heisenberg
from hamdist.lie import (PAULI_X, PAULI_Z, ad_action, build_basis, expm_i, random_hermitian,
                         random_unitary)
from hamdist.superop import (ConjugationDecomposition, SuperOp, ad_superop, apply, averaging_map,
                             conjugation_superop, decompose_into_conjugations, polynomial_of)


def conjugate_directly(U, H):
    return U @ H @ U.conj().T


def test_conjugation_identity():
    np.testing.assert_allclose(conjugation_superop(np.eye(3)).matrix, np.eye(8), atol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_conjugation_matches_operator_conjugation(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        U = random_unitary(n, rng)
        H = random_hermitian(n, rng, traceless=True)
        S = conjugation_superop(U)
        np.testing.assert_allclose(apply(S, H), conjugate_directly(U, H), atol=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_conjugation_preserves_hs_norm(n):
    rng = np.random.default_rng(7)
    U = random_unitary(n, rng)
    H = random_hermitian(n, rng, traceless=True)
    assert np.linalg.norm(apply(conjugation_superop(U), H)) == pytest.approx(np.linalg.norm(H), abs=1e-12)


def test_conjugation_rotates_x_into_y():
    B = build_basis(2)
    S = conjugation_superop(expm_i(PAULI_Z, np.pi / 4))
    # diag(e^{i pi/4}, e^{-i pi/4}) sends X12 -> Y12 and Y12 -> -X12
    expected = np.array([[1, 0, 0], [0, 0, -1], [0, 1, 0]])
    np.testing.assert_allclose(S.matrix, expected, atol=1e-15)
    np.testing.assert_allclose(apply(S, B["X12"]), B["Y12"], atol=1e-15)


@pytest.mark.parametrize("n", [2, 3])
def test_conjugation_is_multiplicative(n):
    rng = np.random.default_rng(3)
    U, V = random_unitary(n, rng), random_unitary(n, rng)
    lhs = conjugation_superop(U @ V).matrix
    rhs = (conjugation_superop(U) @ conjugation_superop(V)).matrix
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_conjugation_dimension_error():
    with pytest.raises(DimensionError):
        conjugation_superop(np.eye(2), build_basis(3))


def test_ad_superop_zero_and_spectrum():
    np.testing.assert_array_equal(ad_superop(np.zeros((3, 3))).matrix, np.zeros((8, 8)))
    w = np.linalg.eigvals(ad_superop(np.diag([1.0, -1.0])).matrix)
    np.testing.assert_allclose(sorted(w, key=lambda z: z.imag), [-2j, 0, 2j], atol=1e-12)
    with pytest.raises(NotTraceless):
        ad_superop(np.eye(2))


@pytest.mark.parametrize("n", [2, 3])
def test_ad_superop_powers_match_nested_commutators(n):
    rng = np.random.default_rng(11)
    G = random_hermitian(n, rng, traceless=True)
    A = random_hermitian(n, rng, traceless=True)
    S = ad_superop(G)
    nested, powered = A, SuperOp.identity(n)
    for _ in range(4):
        nested = ad_action(G, nested)
        powered = S @ powered
        np.testing.assert_allclose(apply(powered, A), nested, atol=1e-10)


@pytest.mark.parametrize("n", [2, 3])
def test_ad_superop_is_derivative_of_conjugation(n):
    rng = np.random.default_rng(5)
    A = random_hermitian(n, rng, traceless=True)
    ad = ad_superop(A).matrix
    errs = []
    for s in (1e-3, 1e-4):
        fd = (conjugation_superop(expm_i(A, s)).matrix - np.eye(n * n - 1)) / s
        errs.append(np.max(np.abs(fd - ad)))
    # first-order finite difference: error shrinks tenfold with s
    assert errs[1] < errs[0] / 5
    assert errs[1] < 1e-3


def test_apply_consistency():
    rng = np.random.default_rng(0)
    G = random_hermitian(3, rng, traceless=True)
    A = random_hermitian(3, rng, traceless=True)
    np.testing.assert_allclose(apply(SuperOp.identity(3), A), A, atol=1e-14)
    np.testing.assert_allclose(apply(ad_superop(G), A), ad_action(G, A), atol=1e-12)
    with pytest.raises(NotTraceless):
        apply(SuperOp.identity(2), np.eye(2))
    with pytest.raises(DimensionError):
        apply(SuperOp.identity(2), np.zeros((3, 3)))


def test_polynomial_of():
    rng = np.random.default_rng(1)
    S = SuperOp(2, rng.standard_normal((3, 3)))
    np.testing.assert_allclose(polynomial_of((1,), S).matrix, S.matrix)
    np.testing.assert_allclose(polynomial_of((0, 0, 1), S).matrix, np.linalg.matrix_power(S.matrix, 3))
    G = np.diag([1.0, -1.0])
    half = polynomial_of((0.5,), ad_superop(2 * G)).matrix
    assert np.max(np.abs(half - ad_superop(G).matrix)) <= 1e-12
    np.testing.assert_allclose(polynomial_of(Polynomial([0, 0, 1]), S).matrix, S.matrix @ S.matrix)
    with pytest.raises(NonzeroConstantTerm):
        polynomial_of(Polynomial([1, 1]), S)


def test_decompose_single_conjugation():
    rng = np.random.default_rng(2)
    V = random_unitary(3, rng)
    L = conjugation_superop(V)
    dec = decompose_into_conjugations(L, seed=4)
    assert dec.residual <= 1e-10
    assert np.max(np.abs(dec.superop().matrix - L.matrix)) <= 1e-10


def test_decompose_identity():
    dec = decompose_into_conjugations(SuperOp.identity(2), seed=0)
    assert np.max(np.abs(dec.superop().matrix - np.eye(3))) <= 1e-10
    single = ConjugationDecomposition.single(np.eye(2))
    np.testing.assert_allclose(single.superop().matrix, np.eye(3))


def test_decomposition_reproduces_operator_action():
    """Reconstructed weighted conjugations act on operators like the target map."""
    rng = np.random.default_rng(9)
    L = SuperOp(3, rng.standard_normal((8, 8)))
    dec = decompose_into_conjugations(L, seed=1)
    H = random_hermitian(3, rng, traceless=True)
    np.testing.assert_allclose(dec.apply_matrix(H), apply(L, H), atol=1e-9)


def test_decomposition_is_reproducible():
    L = SuperOp(2, np.arange(9.0).reshape(3, 3))
    a = decompose_into_conjugations(L, seed=17)
    b = decompose_into_conjugations(L, seed=17)
    np.testing.assert_array_equal(a.coefficients, b.coefficients)
    np.testing.assert_array_equal(a.unitaries, b.unitaries)


def test_undersized_dictionary():
    with pytest.raises(DimensionError):
        decompose_into_conjugations(SuperOp(2, np.ones((3, 3))), seed=0, dict_size=5)


def test_residual_check_raises():
    with config.tolerances(decomposition=0.0):
        with pytest.raises(DecompositionResidual):
            decompose_into_conjugations(SuperOp(2, np.ones((3, 3))), seed=0)


def test_averaging_map_matches_group_average():
    """The normalized formula equals averaging over a group fixing |1> and irreducible on its complement."""
    n = 3
    sub = weyl_heisenberg(n - 1).elements
    group = []
    for g in sub:
        for phase in (1, -1):
            U = np.eye(n, dtype=complex)
            U[0, 0] = phase
            U[1:, 1:] = g
            group.append(U)
    rng = np.random.default_rng(4)
    L = averaging_map(n, normalized=True)
    for _ in range(5):
        H = random_hermitian(n, rng, traceless=True)
        avg = np.mean([U @ H @ U.conj().T for U in group], axis=0)
        np.testing.assert_allclose(apply(L, H), avg, atol=1e-12)


@pytest.mark.parametrize("normalized", [True, False])
def test_averaging_map_decomposes(normalized):
    L = averaging_map(3, normalized=normalized)
    dec = decompose_into_conjugations(L, seed=0)
    assert dec.residual <= 1e-8
    # annihilates every basis element except D_1
    B = build_basis(3)
    for i, E in enumerate(B):
        out = apply(L, E)
        if i == 0:
            assert np.max(np.abs(out)) > 0.1
        else:
            assert np.max(np.abs(out)) <= 1e-12


@pytest.mark.parametrize("n", [2, 3])
def test_span_of_random_maps(n):
    rng = np.random.default_rng(100 + n)
    d = n * n - 1
    for i in range(50):
        L = SuperOp(n, rng.standard_normal((d, d)))
        assert decompose_into_conjugations(L, seed=i).residual <= 1e-8


def test_superop_shape_check():
    with pytest.raises(DimensionError):
        SuperOp(2, np.eye(4))
