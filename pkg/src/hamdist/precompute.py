"""Classical planning stage.

Given hypotheses H_1..H_n this module builds

* a two-eigenvalue generator ``G`` and a rank-one map ``L`` with
  ``L(H_j) = lambda_j G``;
* integer targets ``m_j``, distinct modulo n;
* an odd polynomial ``p`` with ``p(Ad(lambda_j G))(A) = m_j C`` where
  ``C = Ad(G)(A)``;
* a rank-one map ``Ltilde`` sending ``C`` to ``D' 2 pi / n``;
* conjugation decompositions of ``L`` and ``Ltilde``.

The chain ``Ltilde(p(Ad(L(H_j)))(A)) = m_j D' 2 pi / n`` is checked before a
plan is returned.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import config
from .errors import (DecompositionResidual, FunctionalCollision, InfeasibleTargets, NotDistinct,
                     PlanVerificationFailed, SingularInterpolation, ZeroC)
from .lie import (AlgebraBasis, ad_action, as_hermitian, build_basis, random_hermitian,
                  shifted_diag, traceless_part)
from .superop import (ConjugationDecomposition, SuperOp, ad_superop, decompose_into_conjugations,
                      default_dict_size, odd_to_full, polynomial_of)

log = logging.getLogger(__name__)

MAX_FUNCTIONAL_DRAWS = 64
MAX_DECOMPOSITION_RETRIES = 4


@dataclass(frozen=True, eq=False)
class DiscriminationInstance:
    hamiltonians: tuple
    traceless: tuple = field(init=False)

    def __post_init__(self):
        hs = tuple(as_hermitian(H) for H in self.hamiltonians)
        dims = {H.shape[0] for H in hs}
        if len(dims) != 1:
            raise NotDistinct(f"hypotheses have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "hamiltonians", hs)
        object.__setattr__(self, "traceless", tuple(traceless_part(H) for H in hs))
        for i in range(len(hs)):
            for j in range(i):
                gap = np.max(np.abs(self.traceless[i] - self.traceless[j]))
                if gap < config.TOL.distinct:
                    raise NotDistinct(
                        f"hypotheses {j + 1} and {i + 1} differ only by a multiple of the identity")

    @property
    def n(self) -> int:
        return self.hamiltonians[0].shape[0]

    def __len__(self):
        return len(self.hamiltonians)


def make_instance(hamiltonians) -> DiscriminationInstance:
    inst = DiscriminationInstance(tuple(hamiltonians))
    if len(inst) != inst.n:
        raise NotDistinct(f"need exactly n={inst.n} hypotheses, got {len(inst)}")
    return inst


def choose_G(n: int) -> np.ndarray:
    """diag(n-1, -1, ..., -1): eigenvalues n-1 and -1, gap n."""
    return np.diag([n - 1.0] + [-1.0] * (n - 1)).astype(complex)


def two_level_spectrum(G) -> tuple[float, float]:
    """Return (alpha, beta), alpha > beta, for an operator with two clustered eigenvalues."""
    w = np.linalg.eigvalsh(G)
    clusters = [w[0]]
    for x in w[1:]:
        if x - clusters[-1] > config.TOL.eigen_cluster:
            clusters.append(x)
    if len(clusters) != 2:
        raise ValueError(f"expected two distinct eigenvalues, found {len(clusters)}")
    return float(clusters[1]), float(clusters[0])


def find_sign_pairs(traceless_parts) -> tuple[list[tuple[int, int]], list[int]]:
    """Pairs (i, j) with T_i = -T_j, and indices with T_i = 0."""
    tol = config.TOL.distinct
    zeros = [i for i, T in enumerate(traceless_parts) if np.max(np.abs(T)) < tol]
    pairs = []
    for i, Ti in enumerate(traceless_parts):
        for j in range(i + 1, len(traceless_parts)):
            if i not in zeros and np.max(np.abs(Ti + traceless_parts[j])) < tol:
                pairs.append((i, j))
    return pairs, zeros


def lambdas_from_functional(F, traceless_parts) -> np.ndarray:
    return np.array([np.real(np.trace(F @ T)) for T in traceless_parts])


def _separation(lambdas, pairs, zeros) -> float:
    """Smallest relative gap among the |lambda| values that must differ."""
    skip = {j for _, j in pairs} | set(zeros)
    vals = np.array([abs(x) for i, x in enumerate(lambdas) if i not in skip])
    scale = np.max(np.abs(lambdas), initial=0.0)
    if scale == 0 or vals.size == 0:
        return np.inf if vals.size == 0 else 0.0
    pts = np.sort(np.concatenate([[0.0], vals]))
    return float(np.min(np.diff(pts)) / scale)


class LambdaChoice(NamedTuple):
    lambdas: np.ndarray
    functional: np.ndarray
    sign_pairs: list
    zeros: list


def find_lambdas(inst: DiscriminationInstance, seed: int = 0) -> LambdaChoice:
    """Draw a random functional F and set lambda_j = tr(F T_j), scaled so max |lambda| = 1.

    Exact negation pairs force lambda_i = -lambda_j and zero traceless parts
    force lambda_i = 0; both are recorded instead of rejected. Otherwise the
    |lambda_j| must be nonzero and pairwise distinct.
    """
    pairs, zeros = find_sign_pairs(inst.traceless)
    rng = np.random.default_rng([seed, 1])
    best = None
    for _ in range(MAX_FUNCTIONAL_DRAWS):
        F = random_hermitian(inst.n, rng, traceless=True)
        lam = lambdas_from_functional(F, inst.traceless)
        scale = np.max(np.abs(lam), initial=0.0)
        if scale == 0:
            continue
        F, lam = F / scale, lam / scale
        sep = _separation(lam, pairs, zeros)
        if sep >= config.TOL.lambda_separation:
            return LambdaChoice(lam, F, pairs, zeros)
        if best is None or sep > best[0]:
            best = (sep, lam, F)
    if best is not None and best[0] >= config.TOL.lambda_min_separation:
        log.warning("lambda separation only %.3g after %d draws", best[0], MAX_FUNCTIONAL_DRAWS)
        return LambdaChoice(best[1], best[2], pairs, zeros)
    raise FunctionalCollision(
        f"no functional separated the hypotheses after {MAX_FUNCTIONAL_DRAWS} draws")


def assign_targets(lambdas, sign_pairs, n: int, zeros=()) -> list[int]:
    """Integer exponents m_j, distinct mod n, with m_i = -m_j on sign pairs.

    Sign pairs take residue classes {r, -r} with r != -r (mod n) first, since
    they are the constrained ones; a zero lambda must take m = 0; the rest get
    the smallest positive integers whose residues are still free.
    """
    count = len(lambdas)
    targets: list[int | None] = [None] * count
    used: set[int] = set()
    for i in zeros:
        if 0 in used:
            raise InfeasibleTargets("two hypotheses need residue 0")
        targets[i] = 0
        used.add(0)
    for i, j in sign_pairs:
        m = next((r for r in range(1, n) if r % n != (-r) % n
                  and r % n not in used and (-r) % n not in used), None)
        if m is None:
            raise InfeasibleTargets(
                f"hypotheses {i + 1} and {j + 1} are negatives of each other and no residue "
                f"pair r, -r (mod {n}) is left; an odd polynomial cannot separate them")
        targets[i], targets[j] = m, -m
        used |= {m % n, (-m) % n}
    for i in range(count):
        if targets[i] is None:
            m = 1
            while m % n in used:
                m += 1
            targets[i] = m
            used.add(m % n)
    if len(used) != count:
        raise InfeasibleTargets(f"cannot give {count} hypotheses distinct residues mod {n}")
    return [int(t) for t in targets]


def interpolate_odd_polynomial(lambdas, targets, delta: float) -> np.ndarray:
    """Odd coefficients (b_1, b_3, ...) of p with p(i lambda_j delta) = i m_j delta.

    The real interpolant q(y) = a_1 y + a_3 y^3 + ... solves q(lambda_j delta)
    = m_j delta; p then has b_r = (-1)^((r-1)/2) a_r so that p(iy) = i q(y).
    Conditions are taken once per distinct |lambda|; zero lambdas impose nothing.
    """
    conds: dict[float, float] = {}
    for lam, m in zip(lambdas, targets):
        if lam == 0:
            if m != 0:
                raise SingularInterpolation("zero lambda needs target 0")
            continue
        y, v = abs(lam) * delta, np.sign(lam) * m * delta
        for y0, v0 in conds.items():
            if abs(y - y0) <= 1e-12 * max(y, y0):
                if abs(v - v0) > 1e-9 * max(abs(v), 1.0):
                    raise SingularInterpolation(f"|lambda| = {abs(lam):.6g} carries two targets")
                break
        else:
            conds[y] = v
    if not conds:
        return np.zeros(1)
    ys = np.array(list(conds))
    vs = np.array(list(conds.values()))
    powers = 2 * np.arange(len(ys)) + 1
    V = ys[:, None] ** powers[None, :]
    if np.linalg.cond(V) > 1e14:
        raise SingularInterpolation(f"odd Vandermonde system is singular (cond {np.linalg.cond(V):.3g})")
    a = np.linalg.solve(V, vs)
    return a * (-1.0) ** ((powers - 1) // 2)


def build_A_C(G, basis: AlgebraBasis | None = None) -> tuple[np.ndarray, np.ndarray]:
    n = G.shape[0]
    basis = build_basis(n) if basis is None else basis
    A = np.array(basis["X12"])
    return A, ad_action(G, A)


def rank_one_superop(out, functional, basis: AlgebraBasis) -> SuperOp:
    """SuperOp of ``B -> <functional, B>_HS * out``."""
    col = basis.coords_unchecked(out)
    row = basis.overlaps(functional)
    return SuperOp(basis.n, np.outer(col, row))


def build_L(F, G, basis: AlgebraBasis | None = None) -> SuperOp:
    """B -> tr(F B) G."""
    basis = build_basis(G.shape[0]) if basis is None else basis
    return rank_one_superop(G, np.asarray(F).conj().T, basis)


def build_Ltilde(C, n: int, basis: AlgebraBasis | None = None) -> SuperOp:
    """B -> (<C, B> / <C, C>) D' 2 pi / n, so that C maps exactly to D' 2 pi / n."""
    basis = build_basis(n) if basis is None else basis
    norm2 = float(np.real(np.vdot(C, C)))
    if norm2 < config.TOL.traceless:
        raise ZeroC("C vanishes; pick A with support across both eigenspaces of G")
    return rank_one_superop(shifted_diag(n) * (2 * np.pi / n), np.asarray(C) / norm2, basis)


@dataclass(frozen=True, eq=False)
class PrecomputePlan:
    instance: DiscriminationInstance
    seed: int
    G: np.ndarray
    functional: np.ndarray
    lambdas: np.ndarray
    sign_pairs: list
    targets: list
    poly: np.ndarray
    A: np.ndarray
    C: np.ndarray
    Dprime: np.ndarray
    L_decomp: ConjugationDecomposition
    Ltilde_decomp: ConjugationDecomposition

    @property
    def n(self) -> int:
        return self.G.shape[0]

    @property
    def delta(self) -> float:
        alpha, beta = two_level_spectrum(self.G)
        return alpha - beta

    @property
    def poly_full(self) -> list[float]:
        return odd_to_full(self.poly)

    def target_operator(self, j: int) -> np.ndarray:
        return self.targets[j] * self.Dprime * (2 * np.pi / self.n)

    def chain(self, j: int, basis: AlgebraBasis | None = None) -> np.ndarray:
        """Ltilde(p(Ad(L(T_j)))(A)) using the decomposed maps."""
        basis = build_basis(self.n) if basis is None else basis
        L, Lt = self.L_decomp.superop(basis), self.Ltilde_decomp.superop(basis)
        T = self.instance.traceless[j]
        G_j = basis.combine(L.matrix @ basis.coords_unchecked(T))
        P = polynomial_of(self.poly_full, ad_superop(_herm(G_j), basis))
        a = basis.coords_unchecked(self.A)
        return basis.combine(Lt.matrix @ (P.matrix @ a))


def _herm(X):
    return (X + X.conj().T) / 2


def verify_plan(plan: PrecomputePlan, tol: float | None = None) -> float:
    """Check the full chain for every hypothesis; return the worst deviation."""
    tol = config.TOL.plan if tol is None else tol
    basis = build_basis(plan.n)
    worst = 0.0
    if len(plan.targets) != len(plan.instance):
        raise PlanVerificationFailed("plan has the wrong number of targets")
    residues = [m % plan.n for m in plan.targets]
    if len(set(residues)) != len(residues):
        raise PlanVerificationFailed(f"targets {plan.targets} repeat a residue mod {plan.n}")
    for j in range(len(plan.instance)):
        dev = float(np.max(np.abs(plan.chain(j, basis) - plan.target_operator(j))))
        if not dev <= tol:
            raise PlanVerificationFailed(
                f"hypothesis {j + 1}: chain misses m_j D' 2pi/n by {dev:.3g}", index=j, deviation=dev)
        worst = max(worst, dev)
    return worst


def _decompose(S: SuperOp, seed: int, dict_size: int | None) -> ConjugationDecomposition:
    size = default_dict_size(S.n) if dict_size is None else dict_size
    for attempt in range(MAX_DECOMPOSITION_RETRIES):
        try:
            return decompose_into_conjugations(S, seed=seed + attempt, dict_size=size)
        except DecompositionResidual:
            log.info("decomposition retry %d with a larger dictionary", attempt + 1)
            size *= 2
    return decompose_into_conjugations(S, seed=seed + MAX_DECOMPOSITION_RETRIES, dict_size=size)


def make_plan(inst: DiscriminationInstance, seed: int = 0, dict_size: int | None = None) -> PrecomputePlan:
    n = inst.n
    basis = build_basis(n)
    G = choose_G(n)
    alpha, beta = two_level_spectrum(G)
    choice = find_lambdas(inst, seed)
    targets = assign_targets(choice.lambdas, choice.sign_pairs, n, choice.zeros)
    poly = interpolate_odd_polynomial(choice.lambdas, targets, alpha - beta)
    A, C = build_A_C(G, basis)
    L = build_L(choice.functional, G, basis)
    Lt = build_Ltilde(C, n, basis)
    plan = PrecomputePlan(
        instance=inst, seed=seed, G=G, functional=choice.functional, lambdas=choice.lambdas,
        sign_pairs=[list(p) for p in choice.sign_pairs], targets=targets, poly=poly, A=A, C=C,
        Dprime=shifted_diag(n),
        L_decomp=_decompose(L, 2 * seed, dict_size),
        Ltilde_decomp=_decompose(Lt, 2 * seed + 1, dict_size),
    )
    verify_plan(plan)
    return plan
