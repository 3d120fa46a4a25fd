"""Real-linear maps on su(n) and their decomposition into unitary conjugations.

A :class:`SuperOp` is the real ``(n^2-1) x (n^2-1)`` matrix of a map in the
coordinates of :func:`hamdist.lie.build_basis`. Any such map is a real
combination of conjugations ``B -> U B U^dag``;
:func:`decompose_into_conjugations` finds one by least squares over a seeded
dictionary of random unitaries.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from . import config
from .errors import DecompositionResidual, DimensionError, NonzeroConstantTerm
from .lie import AlgebraBasis, as_hermitian, as_unitary, build_basis, random_unitary

RNG_NAME = "numpy.random.PCG64"


@dataclass(frozen=True, eq=False)
class SuperOp:
    n: int
    matrix: np.ndarray

    def __post_init__(self):
        d = self.n * self.n - 1
        if self.matrix.shape != (d, d):
            raise DimensionError(f"SuperOp for n={self.n} must be {d}x{d}, got {self.matrix.shape}")

    @classmethod
    def identity(cls, n: int) -> "SuperOp":
        return cls(n, np.eye(n * n - 1))

    @classmethod
    def zero(cls, n: int) -> "SuperOp":
        return cls(n, np.zeros((n * n - 1, n * n - 1)))

    def __matmul__(self, other: "SuperOp") -> "SuperOp":
        if other.n != self.n:
            raise DimensionError("SuperOp dimension mismatch")
        return SuperOp(self.n, self.matrix @ other.matrix)

    def __add__(self, other: "SuperOp") -> "SuperOp":
        if other.n != self.n:
            raise DimensionError("SuperOp dimension mismatch")
        return SuperOp(self.n, self.matrix + other.matrix)

    def __mul__(self, scalar: float) -> "SuperOp":
        return SuperOp(self.n, float(scalar) * self.matrix)

    __rmul__ = __mul__

    def __call__(self, H) -> np.ndarray:
        return apply(self, H)


def _basis(n: int, basis: AlgebraBasis | None) -> AlgebraBasis:
    basis = build_basis(n) if basis is None else basis
    if basis.n != n:
        raise DimensionError(f"basis dim {basis.n} does not match operator dim {n}")
    return basis


def conjugation_superop(U, basis: AlgebraBasis | None = None) -> SuperOp:
    """SuperOp of ``X -> U X U^dag``."""
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {U.shape}")
    basis = _basis(U.shape[0], basis)
    images = U @ basis.elements @ U.conj().T
    return SuperOp(basis.n, basis.coords_unchecked(images).T)


def _conjugation_stack(Us: np.ndarray, basis: AlgebraBasis) -> np.ndarray:
    """Matrices of conjugation by each of ``Us``, shape ``(m, d, d)``."""
    images = Us[:, None] @ basis.elements[None] @ Us.conj().transpose(0, 2, 1)[:, None]
    return basis.coords_unchecked(images).transpose(0, 2, 1)


def ad_superop(A, basis: AlgebraBasis | None = None) -> SuperOp:
    """SuperOp of ``X -> i[A, X]``."""
    A = as_hermitian(A, traceless=True)
    basis = _basis(A.shape[0], basis)
    E = basis.elements
    images = 1j * (A @ E - E @ A)
    return SuperOp(basis.n, basis.coords_unchecked(images).T)


def apply(S: SuperOp, H, basis: AlgebraBasis | None = None) -> np.ndarray:
    H = as_hermitian(H, traceless=True)
    if H.shape[0] != S.n:
        raise DimensionError(f"operator dim {H.shape[0]} does not match SuperOp dim {S.n}")
    basis = _basis(S.n, basis)
    return basis.combine(S.matrix @ basis.coords_unchecked(H))


def polynomial_of(coeffs, S: SuperOp) -> SuperOp:
    """``sum_k a_k S^k`` for ``coeffs = (a_1, a_2, ...)``.

    A :class:`numpy.polynomial.Polynomial` is also accepted; its constant
    coefficient must vanish.
    """
    if isinstance(coeffs, Polynomial):
        full = np.asarray(coeffs.coef, dtype=float)
        if full[0] != 0:
            raise NonzeroConstantTerm(f"polynomial has constant term {full[0]}")
        coeffs = full[1:]
    out = np.zeros_like(S.matrix)
    power = np.eye(S.matrix.shape[0])
    for a in coeffs:
        power = power @ S.matrix
        if a:
            out = out + a * power
    return SuperOp(S.n, out)


def odd_to_full(odd_coeffs) -> list[float]:
    """(b_1, b_3, b_5, ...) -> (b_1, 0, b_3, 0, b_5) for :func:`polynomial_of`."""
    full: list[float] = []
    for i, b in enumerate(odd_coeffs):
        if i:
            full.append(0.0)
        full.append(float(b))
    return full


@dataclass(frozen=True, eq=False)
class ConjugationDecomposition:
    """A map written as ``B -> sum_j c_j U_j B U_j^dag``."""

    coefficients: np.ndarray
    unitaries: np.ndarray
    residual: float
    seed: int | None = None
    dict_size: int | None = None
    generator: str = field(default=RNG_NAME)

    @property
    def n(self) -> int:
        return self.unitaries.shape[1]

    @property
    def terms(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.coefficients.tolist(), self.unitaries))

    def __len__(self):
        return len(self.coefficients)

    def superop(self, basis: AlgebraBasis | None = None) -> SuperOp:
        basis = _basis(self.n, basis)
        stack = _conjugation_stack(self.unitaries, basis)
        return SuperOp(self.n, np.einsum("j,jab->ab", self.coefficients, stack))

    def apply_matrix(self, X) -> np.ndarray:
        """Apply the weighted conjugations to any matrix, identity part included."""
        U = self.unitaries
        return np.einsum("j,jab->ab", self.coefficients, U @ X @ U.conj().transpose(0, 2, 1))

    @classmethod
    def single(cls, U, c: float = 1.0) -> "ConjugationDecomposition":
        U = as_unitary(U)
        return cls(np.array([float(c)]), U[None].copy(), 0.0)


def default_dict_size(n: int, margin: int = 32) -> int:
    return (n * n - 1) ** 2 + margin


def decompose_into_conjugations(L: SuperOp, seed: int = 0, dict_size: int | None = None,
                                basis: AlgebraBasis | None = None) -> ConjugationDecomposition:
    """Least-squares fit of ``L`` by conjugations with seeded random unitaries.

    Raises :class:`DecompositionResidual` when the fitted map misses ``L`` by
    more than ``config.TOL.decomposition``; retry with another seed or a
    larger dictionary.
    """
    n = L.n
    d2 = (n * n - 1) ** 2
    dict_size = default_dict_size(n) if dict_size is None else int(dict_size)
    if dict_size < d2:
        raise DimensionError(f"dictionary of {dict_size} cannot span {d2} dimensions")
    basis = _basis(n, basis)
    rng = np.random.default_rng(seed)
    Us = np.array([random_unitary(n, rng) for _ in range(dict_size)])
    stack = _conjugation_stack(Us, basis)
    M = stack.reshape(dict_size, d2).T
    target = L.matrix.reshape(d2)
    c, *_ = np.linalg.lstsq(M, target, rcond=None)
    keep = np.abs(c) >= config.TOL.prune
    c, Us, M = c[keep], Us[keep], M[:, keep]
    residual = float(np.max(np.abs(M @ c - target), initial=0.0))
    if residual > config.TOL.decomposition:
        raise DecompositionResidual(
            f"conjugation dictionary (seed={seed}, size={dict_size}) misses target by {residual:.3g}")
    return ConjugationDecomposition(c, Us, residual, seed=seed, dict_size=dict_size)


def superop_from_function(f, n: int, basis: AlgebraBasis | None = None) -> SuperOp:
    """Tabulate a linear map given as a Python callable on traceless matrices."""
    basis = _basis(n, basis)
    cols = [basis.coords_unchecked(np.asarray(f(E), dtype=complex)) for E in basis.elements]
    return SuperOp(n, np.array(cols).T)


def averaging_map(n: int, keep: int = 0, normalized: bool = True) -> SuperOp:
    """``A -> (1-P) A (1-P) + w tr(P A P) P``, ``P`` projecting off basis vector ``keep``.

    With ``normalized`` the weight is ``w = 1/(n-1)``, which is what averaging
    over a group irreducible on the range of ``P`` produces and keeps the
    image traceless. With ``w = 1`` the image picks up an identity component
    for n > 2, which the coordinate chart projects away.
    """
    P = np.eye(n, dtype=complex)
    P[keep, keep] = 0
    Q = np.eye(n) - P
    w = 1.0 / (n - 1) if normalized else 1.0

    def f(A):
        return Q @ A @ Q + w * np.trace(P @ A @ P) * P

    return superop_from_function(f, n)
