"""Self-check suites behind ``hamdist verify``."""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .gadgets import Budgets, Commutator, SignedWait, evaluate, evaluate_trotter, reversal_sequence, weyl_heisenberg
from .lie import PAULI_X, PAULI_Y, PAULI_Z, expm_i, random_hermitian
from .precompute import make_instance, make_plan, verify_plan
from .protocol import run_direct_example, run_discrimination
from .superop import SuperOp, averaging_map, decompose_into_conjugations


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


def group_averaging(n: int, trials: int = 20, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    g = weyl_heisenberg(n)
    worst = 0.0
    for _ in range(trials):
        H = random_hermitian(n, rng)
        dev = np.max(np.abs(g.average(H) - np.trace(H) / n * np.eye(n)))
        worst = max(worst, dev)
    return Check(f"schur averaging n={n}", worst <= 1e-12, f"max dev {worst:.2e}")


def decomposition_span(n: int, trials: int, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    d = n * n - 1
    worst = 0.0
    maps = [SuperOp(n, rng.standard_normal((d, d))) for _ in range(trials)] + [averaging_map(n)]
    for i, S in enumerate(maps):
        dec = decompose_into_conjugations(S, seed=seed + i)
        worst = max(worst, np.max(np.abs(dec.superop().matrix - S.matrix)))
    return Check(f"conjugation span n={n} ({len(maps)} maps)", worst <= 1e-8, f"max residual {worst:.2e}")


def halving_ratios(errors) -> list[float]:
    return [errors[i] / errors[i + 1] for i in range(len(errors) - 1)]


def reversal_convergence(n: int, trials: int = 10, seed: int = 0, ms=(16, 32, 64)) -> Check:
    rng = np.random.default_rng(seed)
    g = weyl_heisenberg(n)
    ok, worst_ratio = True, []
    for _ in range(trials):
        H = random_hermitian(n, rng, traceless=True)
        H /= np.linalg.norm(H, 2)
        errs = [np.linalg.norm(evaluate(reversal_sequence(1.0, m, g), H) - expm_i(H, -1.0), 2) for m in ms]
        r = halving_ratios(errs)
        worst_ratio += r
        ok &= errs[-1] <= 0.1 and all(1.5 <= x <= 2.5 for x in r)
    return Check(f"reversal convergence n={n}", bool(ok),
                 f"ratios in [{min(worst_ratio):.2f}, {max(worst_ratio):.2f}]")


def commutator_errors(ms=(8, 16, 32)) -> list[float]:
    node = Commutator(SignedWait(), PAULI_X)
    target = expm_i(-2 * PAULI_Y, 1.0)
    return [np.linalg.norm(evaluate_trotter(node, PAULI_Z, Budgets(m=m, k=1)) - target, 2) for m in ms]


def commutator_convergence() -> Check:
    errs = commutator_errors()
    r = halving_ratios(errs)
    return Check("commutator convergence n=2", errs[-1] <= 0.05 and all(1.5 <= x <= 2.5 for x in r),
                 f"errors {', '.join(f'{e:.3g}' for e in errs)}")


def plan_identity(hamiltonians, label: str, seed: int = 0) -> Check:
    plan = make_plan(make_instance(hamiltonians), seed=seed)
    dev = verify_plan(plan)
    res = run_discrimination(plan.instance, plan, "ideal")
    return Check(f"plan identity {label}", res.success >= 1 - 1e-6,
                 f"chain dev {dev:.2e}, success {res.success:.9f}")


def random_plans(n: int, count: int, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    worst = 1.0
    for i in range(count):
        inst = make_instance([random_hermitian(n, rng) for _ in range(n)])
        plan = make_plan(inst, seed=seed + i)
        worst = min(worst, run_discrimination(inst, plan, "ideal").success)
    return Check(f"random plans n={n} x{count}", worst >= 1 - 1e-6, f"worst success {worst:.9f}")


def worked_example(ns=(2, 3, 4, 5)) -> Check:
    worst = 0.0
    for n in ns:
        res = run_direct_example(n)
        worst = max(worst, np.max(np.abs(res.gram - np.eye(n))))
    return Check("diagonal example orthogonality", worst <= 1e-12, f"max gram dev {worst:.2e}")


def suite(level: str = "quick") -> list[Callable[[], Check]]:
    checks = [
        worked_example,
        lambda: group_averaging(2),
        lambda: decomposition_span(2, 10),
        lambda: reversal_convergence(2),
        commutator_convergence,
        lambda: plan_identity([PAULI_Z, PAULI_X], "{sz, sx}"),
    ]
    if level == "full":
        checks += [
            lambda: group_averaging(3),
            lambda: group_averaging(4),
            lambda: decomposition_span(3, 50),
            lambda: reversal_convergence(3),
            lambda: random_plans(2, 20),
            lambda: random_plans(3, 10),
        ]
    return checks


def run_suite(level: str = "quick") -> list[Check]:
    return [check() for check in suite(level)]
