"""Unitary-and-wait sequences that simulate derived evolutions of an unknown H.

A gadget is described by a small tree of :data:`GadgetSpec` nodes. Each node
stands for ``exp(i K s)`` where ``K`` is a Hermitian generator built from the
unknown Hamiltonian:

``SignedWait``    K = H
``Commutator``    K = i[K_left, K_right]           (right may be a known matrix)
``LinearMap``     K = sum_j c_j U_j K_inner U_j^dag
``PolynomialAd``  K = p(Ad(K_gen))(A)

When a node is used as the child of another, it contributes ``s * K``.

Two evaluation modes exist. :func:`evaluate_ideal` computes the exact limit
``exp(i K s)``. :func:`expand` produces the finite product formula as a
nested tree of :class:`Repeat` blocks, which can be flattened into a physical
:class:`GateSequence` or evaluated directly with matrix powers. Levels below
``Budgets.depth`` are left as :class:`Ideal` blocks (hybrid mode).
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

import numpy as np

from .errors import BudgetTooSmall, DimensionError, NonpositiveTime, NonzeroConstantTerm
from .lie import ad_action, as_hermitian, expm_i
from .superop import ConjugationDecomposition


# --- sequence segments -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ApplyKnown:
    U: np.ndarray


@dataclass(frozen=True)
class Wait:
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise NonpositiveTime(f"wait duration must be positive, got {self.t}")


@dataclass(frozen=True, eq=False)
class Repeat:
    reps: int
    body: tuple


@dataclass(frozen=True, eq=False)
class Ideal:
    """Exact ``exp(i K t)`` of a gadget node, used below the expansion depth."""

    node: object
    t: float


Segment = Union[ApplyKnown, Wait]


@dataclass(frozen=True, eq=False)
class GateSequence:
    """Time-ordered segments: the first segment acts first."""

    n: int
    segments: tuple

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)


@dataclass(frozen=True)
class Cost:
    applies: int = 0
    waits: int = 0
    total_wait_time: float = 0.0
    ideal_blocks: int = 0

    @property
    def segments(self) -> int:
        return self.applies + self.waits + self.ideal_blocks

    def __add__(self, other: "Cost") -> "Cost":
        return Cost(self.applies + other.applies, self.waits + other.waits,
                    self.total_wait_time + other.total_wait_time,
                    self.ideal_blocks + other.ideal_blocks)

    def __mul__(self, reps: int) -> "Cost":
        return Cost(self.applies * reps, self.waits * reps, self.total_wait_time * reps,
                    self.ideal_blocks * reps)


# --- reversal group ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ReversalGroup:
    """Weyl-Heisenberg operators X^a Z^b; element 0 is the identity."""

    n: int
    elements: np.ndarray

    @property
    def non_identity(self) -> np.ndarray:
        return self.elements[1:]

    def average(self, H) -> np.ndarray:
        E = self.elements
        return np.mean(E @ H @ E.conj().transpose(0, 2, 1), axis=0)


@functools.lru_cache(maxsize=None)
def weyl_heisenberg(n: int) -> ReversalGroup:
    X = np.roll(np.eye(n, dtype=complex), 1, axis=0)
    Z = np.diag(np.exp(2j * np.pi * np.arange(n) / n))
    els = [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b)
           for a in range(n) for b in range(n)]
    elements = np.array(els)
    elements.flags.writeable = False
    return ReversalGroup(n, elements)


# --- gadget specs ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SignedWait:
    s: float = 1.0


@dataclass(frozen=True, eq=False)
class Commutator:
    left: object
    right: object
    s: float = 1.0


@dataclass(frozen=True, eq=False)
class LinearMap:
    decomp: ConjugationDecomposition
    inner: object
    s: float = 1.0
    k: int | None = None


@dataclass(frozen=True, eq=False)
class PolynomialAd:
    poly: tuple
    generator: object
    A: np.ndarray
    s: float = 1.0
    k: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "poly", tuple(float(a) for a in self.poly))

    def monomials(self) -> list[tuple[float, "Commutator"]]:
        """(a_r, node for Ad(gen)^r(A)) for every nonzero coefficient."""
        out = []
        node: object = self.A
        for a in self.poly:
            node = Commutator(self.generator, node)
            if a:
                out.append((a, node))
        return out


GadgetSpec = Union[SignedWait, Commutator, LinearMap, PolynomialAd]


def polynomial_ad(poly, generator, A, s: float = 1.0, k: int | None = None,
                  constant: float = 0.0) -> PolynomialAd:
    if constant:
        raise NonzeroConstantTerm(f"polynomial must vanish at 0, constant term is {constant}")
    return PolynomialAd(tuple(poly), generator, as_hermitian(A), s, k)


@dataclass(frozen=True)
class Budgets:
    """Product-formula knobs shared by every nesting level.

    ``m``: reversal steps and commutator root-steps; ``k``: repetitions of
    linear-map and polynomial products; ``depth``: number of levels expanded
    into product formulas (``None`` expands everything).

    ``symmetric_reversal`` runs each reversal step over the group forwards
    and then backwards with half the wait. Nested commutators need the gadget
    at ``-t`` to invert the one at ``t``; the plain ordering breaks this at
    second order and deep expansions then stall instead of converging.
    """

    m: int = 16
    k: int = 16
    depth: int | None = None
    cap: int = 10**8
    symmetric_reversal: bool = False

    def __post_init__(self):
        if self.m < 1 or self.k < 1 or self.cap < 1 or (self.depth is not None and self.depth < 0):
            raise ValueError(f"invalid budgets {self}")


# --- exact generators --------------------------------------------------------

def generator(node, H, _memo=None) -> np.ndarray:
    """Hermitian ``K`` such that ``node`` realizes ``exp(i K node.s)``."""
    if isinstance(node, np.ndarray):
        return node
    memo = {} if _memo is None else _memo
    key = id(node)
    if key in memo:
        return memo[key][1]

    def eff(child):
        if isinstance(child, np.ndarray):
            return child
        return child.s * generator(child, H, memo)

    if isinstance(node, SignedWait):
        K = H
    elif isinstance(node, Commutator):
        K = ad_action(eff(node.left), eff(node.right))
    elif isinstance(node, LinearMap):
        K = node.decomp.apply_matrix(eff(node.inner))
    elif isinstance(node, PolynomialAd):
        Gp = eff(node.generator)
        term, K = node.A, np.zeros_like(node.A)
        for a in node.poly:
            term = ad_action(Gp, term)
            K = K + a * term
    else:
        raise TypeError(f"not a gadget node: {node!r}")
    K = (K + K.conj().T) / 2
    memo[key] = (node, K)
    return K


def evaluate_ideal(spec, H) -> np.ndarray:
    H = as_hermitian(H)
    return expm_i(generator(spec, H), spec.s)


# --- product-formula expansion -----------------------------------------------

def reversal_sequence(t: float, m: int, group: ReversalGroup, symmetric: bool = False) -> GateSequence:
    """Approximates exp(-i H t) for traceless H using only forward waits."""
    return GateSequence(group.n, tuple(flatten(_reversal_items(t, m, group, symmetric))))


def _reversal_items(t: float, m: int, group: ReversalGroup, symmetric: bool = False) -> list:
    if not t > 0:
        raise NonpositiveTime(f"reversal time must be positive, got {t}")
    order = list(group.non_identity)
    step = t / m
    if symmetric:
        order, step = order + order[::-1], step / 2
    body = []
    for U in order:
        body += [ApplyKnown(U), Wait(step), ApplyKnown(U.conj().T)]
    return [Repeat(m, tuple(body))]


def signed_wait_sequence(s: float, m: int, group: ReversalGroup, symmetric: bool = False) -> GateSequence:
    return GateSequence(group.n, tuple(flatten(_signed_wait_items(s, m, group, symmetric))))


def _signed_wait_items(s: float, m: int, group: ReversalGroup, symmetric: bool = False) -> list:
    if s > 0:
        return [Wait(s)]
    if s < 0:
        return _reversal_items(-s, m, group, symmetric)
    return []


def _child_items(child, sigma, budgets, group, depth):
    """Items realizing exp(i * eff(child) * sigma)."""
    if isinstance(child, np.ndarray):
        return [ApplyKnown(expm_i(child, sigma))] if sigma else []
    return _expand(child, child.s * sigma, budgets, group, depth)


def _expand(node, t, budgets: Budgets, group, depth) -> list:
    if t == 0:
        return []
    if isinstance(node, SignedWait):
        if t > 0:
            return [Wait(t)]
        if depth == 0:
            return [Ideal(node, t)]
        return _reversal_items(-t, budgets.m, group, budgets.symmetric_reversal)
    if depth == 0:
        return [Ideal(node, t)]
    sub = None if depth is None else depth - 1
    if isinstance(node, Commutator):
        tau = math.sqrt(abs(t)) / budgets.m
        X, Y = (node.left, node.right) if t > 0 else (node.right, node.left)
        body = (_child_items(Y, -tau, budgets, group, sub) + _child_items(X, -tau, budgets, group, sub)
                + _child_items(Y, tau, budgets, group, sub) + _child_items(X, tau, budgets, group, sub))
        return [Repeat(budgets.m ** 2, tuple(body))]
    if isinstance(node, LinearMap):
        k = node.k or budgets.k
        body = []
        # negative times run the terms backwards so that the gadget at -t is
        # the inverse of the gadget at t; otherwise even-order errors pile up
        # once the result is nested inside a commutator
        terms = node.decomp.terms if t > 0 else node.decomp.terms[::-1]
        for c, U in terms:
            body.append(ApplyKnown(U.conj().T))
            body += _child_items(node.inner, c * t / k, budgets, group, sub)
            body.append(ApplyKnown(U))
        return [Repeat(k, tuple(body))]
    if isinstance(node, PolynomialAd):
        monos = node.monomials()
        # a single monomial needs no product formula
        k = 1 if len(monos) == 1 else (node.k or budgets.k)
        body = []
        for a, mono in (monos if t > 0 else monos[::-1]):
            body += _child_items(mono, a * t / k, budgets, group, sub)
        return [Repeat(k, tuple(body))]
    raise TypeError(f"not a gadget node: {node!r}")


def expand(spec, budgets: Budgets, n: int | None = None, group: ReversalGroup | None = None) -> list:
    """Structured product-formula expansion of ``spec`` at its own time ``spec.s``."""
    if group is None:
        if n is None:
            raise DimensionError("need n or a reversal group")
        group = weyl_heisenberg(n)
    return _expand(spec, spec.s, budgets, group, budgets.depth)


def commutator_sequence(inner, A, s: float, m: int, group: ReversalGroup) -> GateSequence:
    """exp(i * i[F(H), A] * s) where ``inner`` is a gadget node for exp(i F(H) sigma)."""
    node = Commutator(inner, as_hermitian(A), 1.0)
    items = _expand(node, s, Budgets(m=m, k=1), group, None)
    return GateSequence(group.n, tuple(flatten(items)))


def linear_map_sequence(decomp: ConjugationDecomposition, inner, s: float, k: int,
                        group: ReversalGroup, m: int = 16) -> GateSequence:
    node = LinearMap(decomp, inner, 1.0, k)
    items = _expand(node, s, Budgets(m=m, k=k), group, None)
    return GateSequence(group.n, tuple(flatten(items)))


def polynomial_ad_sequence(poly, gen, A, s: float, k: int, group: ReversalGroup, m: int = 16,
                           depth: int | None = None) -> GateSequence:
    node = polynomial_ad(poly, gen, A, 1.0, k)
    items = _expand(node, s, Budgets(m=m, k=k, depth=depth), group, depth)
    return GateSequence(group.n, tuple(flatten(items)))


# --- flattening, cost, evaluation --------------------------------------------

def flatten(items: Iterable) -> Iterator:
    """Stream the time-ordered segments of a structured expansion."""
    for it in items:
        if isinstance(it, Repeat):
            for _ in range(it.reps):
                yield from flatten(it.body)
        else:
            yield it


def cost(seq) -> Cost:
    """Exact counts for a flat sequence or a structured expansion."""
    if isinstance(seq, GateSequence):
        seq = seq.segments
    total = Cost()
    for it in seq:
        if isinstance(it, ApplyKnown):
            total += Cost(applies=1)
        elif isinstance(it, Wait):
            total += Cost(waits=1, total_wait_time=it.t)
        elif isinstance(it, Ideal):
            total += Cost(ideal_blocks=1)
        elif isinstance(it, Repeat):
            total += cost(it.body) * it.reps
        else:
            raise TypeError(f"unknown segment {it!r}")
    return total


def estimate_cost(spec, budgets: Budgets, n: int) -> Cost:
    return cost(expand(spec, budgets, n))


def materialize(spec, budgets: Budgets, n: int) -> GateSequence:
    """Flat physical sequence; refuses hybrid expansions and over-cap lengths."""
    items = expand(spec, budgets, n)
    c = cost(items)
    if c.ideal_blocks:
        raise ValueError("expansion contains ideal blocks; raise depth for a physical sequence")
    if c.segments > budgets.cap:
        raise BudgetTooSmall(f"{c.segments} segments exceed the cap of {budgets.cap}")
    return GateSequence(n, tuple(flatten(items)))


class _Evaluator:
    def __init__(self, H):
        self.H = as_hermitian(H)
        self.w, self.V = np.linalg.eigh(self.H)
        self.memo: dict = {}

    def wait(self, t):
        return (self.V * np.exp(1j * self.w * t)) @ self.V.conj().T

    def items(self, items) -> np.ndarray:
        U = np.eye(self.H.shape[0], dtype=complex)
        for it in items:
            if isinstance(it, ApplyKnown):
                U = it.U @ U
            elif isinstance(it, Wait):
                U = self.wait(it.t) @ U
            elif isinstance(it, Repeat):
                U = np.linalg.matrix_power(self.items(it.body), it.reps) @ U
            elif isinstance(it, Ideal):
                U = expm_i(generator(it.node, self.H, self.memo), it.t) @ U
            else:
                raise TypeError(f"unknown segment {it!r}")
        return U


def evaluate(seq, H) -> np.ndarray:
    """Unitary of a sequence (flat or structured): later segments multiply on the left."""
    H = as_hermitian(H)
    n = seq.n if isinstance(seq, GateSequence) else H.shape[0]
    if H.shape[0] != n:
        raise DimensionError(f"sequence acts on dim {n}, Hamiltonian has dim {H.shape[0]}")
    items = seq.segments if isinstance(seq, GateSequence) else seq
    return _Evaluator(H).items(items)


def evaluate_state(seq, H, psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise ValueError("state must be normalized")
    return evaluate(seq, H) @ psi


def evaluate_trotter(spec, H, budgets: Budgets) -> np.ndarray:
    """Unitary of the finite product formula, without flattening it."""
    H = as_hermitian(H)
    items = expand(spec, budgets, H.shape[0])
    c = cost(items)
    if c.segments > budgets.cap:
        raise BudgetTooSmall(f"{c.segments} segments exceed the cap of {budgets.cap}")
    return _Evaluator(H).items(items)
