"""Dense matrix primitives on the traceless Hermitian algebra su(n).

Operators are plain ``numpy`` complex arrays of shape ``(n, n)``. The helpers
``as_hermitian`` and ``as_unitary`` validate their argument and return it as
a complex array.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import config
from .errors import DimensionError, NotHermitian, NotTraceless, NotUnitary


def _square(M, name="matrix") -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    return M


def _same_dim(*mats):
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")


def is_hermitian(M, tol=None) -> bool:
    tol = config.TOL.hermitian if tol is None else tol
    return bool(np.max(np.abs(M - M.conj().T), initial=0.0) <= tol)


def as_hermitian(M, traceless: bool = False) -> np.ndarray:
    """Validate ``M`` as Hermitian (optionally traceless) and return it."""
    M = _square(M)
    if not is_hermitian(M):
        raise NotHermitian("matrix is not Hermitian")
    if traceless and abs(np.trace(M)) > config.TOL.traceless:
        raise NotTraceless(f"trace {np.trace(M):.3g} is not zero")
    return M


def as_unitary(U) -> np.ndarray:
    U = _square(U)
    dev = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
    if dev > config.TOL.unitary:
        raise NotUnitary(f"U^dag U deviates from identity by {dev:.3g}")
    return U


def hs_inner(A, B) -> float:
    """Real Hilbert-Schmidt inner product ``Re tr(A^dag B)``."""
    return float(np.real(np.vdot(A, B)))


@dataclass(frozen=True, eq=False)
class AlgebraBasis:
    """The non-orthogonal basis D_1..D_{n-1}, X_jk, Y_jk of su(n).

    ``elements`` has shape ``(n*n - 1, n, n)``; ``labels`` names each element.
    Coordinates are defined through the Gram matrix, since neighbouring
    diagonal generators overlap.
    """

    n: int
    elements: np.ndarray
    labels: tuple
    gram: np.ndarray

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, key):
        if isinstance(key, str):
            return self.elements[self.labels.index(key)]
        return self.elements[key]

    def overlaps(self, X) -> np.ndarray:
        """HS inner products of each basis element with ``X`` (or a stack of X)."""
        return np.real(np.einsum("kab,...ab->...k", self.elements.conj(), X))

    def coords_unchecked(self, X) -> np.ndarray:
        b = self.overlaps(X)
        flat = b.reshape(-1, self.size).T
        return np.linalg.solve(self.gram, flat).T.reshape(b.shape)

    def combine(self, c) -> np.ndarray:
        return np.einsum("...k,kab->...ab", np.asarray(c, dtype=float), self.elements)


@functools.lru_cache(maxsize=None)
def build_basis(n: int) -> AlgebraBasis:
    """Basis of su(n): diagonal steps D_i, then X_jk and Y_jk for j < k."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise DimensionError(f"basis needs n >= 2, got {n!r}")
    n = int(n)
    els, labels = [], []
    for i in range(n - 1):
        D = np.zeros((n, n), dtype=complex)
        D[i, i], D[i + 1, i + 1] = 1, -1
        els.append(D)
        labels.append(f"D{i + 1}")
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    for j, k in pairs:
        X = np.zeros((n, n), dtype=complex)
        X[j, k] = X[k, j] = 1
        els.append(X)
        labels.append(f"X{j + 1}{k + 1}")
    for j, k in pairs:
        Y = np.zeros((n, n), dtype=complex)
        Y[j, k], Y[k, j] = 1j, -1j
        els.append(Y)
        labels.append(f"Y{j + 1}{k + 1}")
    elements = np.array(els)
    gram = np.real(np.einsum("kab,lab->kl", elements.conj(), elements))
    elements.flags.writeable = False
    gram.flags.writeable = False
    return AlgebraBasis(n, elements, tuple(labels), gram)


def to_coords(H, basis: AlgebraBasis) -> np.ndarray:
    H = as_hermitian(H, traceless=True)
    if H.shape[0] != basis.n:
        raise DimensionError(f"operator dim {H.shape[0]} does not match basis dim {basis.n}")
    return basis.coords_unchecked(H)


def from_coords(c, basis: AlgebraBasis) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.shape != (basis.size,):
        raise DimensionError(f"expected {basis.size} coordinates, got shape {c.shape}")
    return basis.combine(c)


def commutator(A, B) -> np.ndarray:
    A, B = _square(A), _square(B)
    _same_dim(A, B)
    return A @ B - B @ A


def ad_action(A, B) -> np.ndarray:
    """``i[A, B]``: Hermitian and traceless for Hermitian A, B."""
    return 1j * commutator(A, B)


def expm_i(H, t: float) -> np.ndarray:
    """``exp(i H t)`` through the eigendecomposition of Hermitian ``H``."""
    H = as_hermitian(H)
    w, V = np.linalg.eigh(H)
    return (V * np.exp(1j * w * t)) @ V.conj().T


def traceless_part(H) -> np.ndarray:
    H = as_hermitian(H)
    n = H.shape[0]
    return H - (np.trace(H) / n) * np.eye(n)


def shifted_diag(n: int) -> np.ndarray:
    """diag(1, ..., n) minus its mean, i.e. the traceless shift D'."""
    return np.diag(np.arange(1, n + 1) - (n + 1) / 2).astype(complex)


def random_hermitian(n: int, rng: np.random.Generator, traceless: bool = False) -> np.ndarray:
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = (Z + Z.conj().T) / 2
    if traceless:
        H = H - np.trace(H) / n * np.eye(n)
    return H


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary: QR of a complex Gaussian with the phase fix."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
