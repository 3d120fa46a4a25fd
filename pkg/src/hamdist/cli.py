"""Command-line front end.

Exit codes: 0 success, 1 generic failure, 2 usage error, 3 NotDistinct,
4 InfeasibleTargets, 5 FunctionalCollision, 6 PlanVerificationFailed,
7 BudgetTooSmall, 8 a verify check failed, 9 SingularInterpolation.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import serialize
from .errors import HamdistError
from .gadgets import Budgets
from .precompute import make_plan, verify_plan
from .protocol import run_direct_example, run_discrimination

EXIT_CHECK_FAILED = 8

log = logging.getLogger("hamdist")


def _default_seed() -> int:
    return int(os.environ.get("HAMDIST_SEED", "0"))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        serialize.write_atomic(out, text)


def _parse_sweep(spec: str) -> tuple[str, list[int]]:
    key, _, values = spec.partition("=")
    key = key.strip()
    if key not in ("m", "k", "mk") or not values:
        raise argparse.ArgumentTypeError(f"--sweep expects m=..., k=... or mk=..., got {spec!r}")
    try:
        return key, [int(v) for v in values.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--sweep values must be integers: {spec!r}") from None


def cmd_example(args) -> int:
    res = run_direct_example(args.n)
    print(f"diagonal example n={args.n}: H_j = j*diag(1..{args.n}), wait 2pi/{args.n}")
    for j, row in enumerate(res.confusion.T):
        print(f"  H_{j + 1}: outcome probabilities " + " ".join(f"{p:.6f}" for p in row))
    print(f"success {res.success:.12f}")
    return 0 if abs(res.success - 1) <= 1e-10 else 1


def cmd_plan(args) -> int:
    inst = serialize.instance_from_dict(serialize.load_json(args.instance))
    plan = make_plan(inst, seed=args.seed)
    _emit(serialize.dumps(serialize.plan_to_dict(plan)), args.out)
    log.info("plan verified: targets %s", plan.targets)
    return 0


def _budget_list(args) -> list[Budgets]:
    if args.sweep is None:
        return [Budgets(args.m, args.k, args.depth, args.cap, args.symmetric_reversal)]
    key, values = args.sweep
    out = []
    for v in values:
        m = v if key in ("m", "mk") else args.m
        k = v if key in ("k", "mk") else args.k
        out.append(Budgets(m, k, args.depth, args.cap, args.symmetric_reversal))
    return out


def cmd_simulate(args) -> int:
    plan = serialize.plan_from_dict(serialize.load_json(args.plan))
    verify_plan(plan)
    if args.mode == "ideal":
        results = [run_discrimination(plan.instance, plan, "ideal")]
    else:
        results = [run_discrimination(plan.instance, plan, "trotter", b) for b in _budget_list(args)]
    blocks = [serialize.result_to_dict(r) for r in results]
    doc = {"results": blocks} if args.sweep is not None else blocks[0]
    text = serialize.dumps(doc)
    if args.out is None:
        sys.stdout.write(text)
    else:
        serialize.write_atomic(args.out + ".json", text)
        serialize.write_atomic(args.out + ".csv", serialize.results_to_csv(results))
    for r in results:
        b = r.budgets
        tag = "ideal" if b is None else f"m={b.m} k={b.k} depth={b.depth}"
        print(f"{tag}: success {r.success:.9f}", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    from .suites import Check, run_suite

    checks = run_suite(args.level)
    if args.plan is not None:
        plan = serialize.plan_from_dict(serialize.load_json(args.plan))
        dev = verify_plan(plan)
        checks.append(Check(f"plan file {args.plan}", True, f"chain dev {dev:.2e}"))
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.detail}")
    return 0 if all(c.passed for c in checks) else EXIT_CHECK_FAILED


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _dim(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError(f"n must be >= 2, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hamdist", description="Plan and simulate Hamiltonian discrimination.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("example", help="run the diagonal one-wait example")
    ex.add_argument("n", type=_dim)
    ex.set_defaults(func=cmd_example)

    pl = sub.add_parser("plan", help="build and verify a plan from an instance file")
    pl.add_argument("instance")
    pl.add_argument("--seed", type=int, default=None)
    pl.add_argument("--out")
    pl.set_defaults(func=cmd_plan)

    sim = sub.add_parser("simulate", help="run a plan under every hypothesis")
    sim.add_argument("plan")
    sim.add_argument("--seed", type=int, default=None, help="accepted for symmetry; plans carry their seed")
    sim.add_argument("--mode", choices=("ideal", "trotter"), default="ideal")
    sim.add_argument("--m", type=_positive, default=16)
    sim.add_argument("--k", type=_positive, default=16)
    sim.add_argument("--depth", type=int, default=1, help="levels to expand; -1 expands all")
    sim.add_argument("--cap", type=_positive, default=10**8)
    sim.add_argument("--sweep", type=_parse_sweep)
    sim.add_argument("--symmetric-reversal", action="store_true",
                     help="palindromic reversal steps; helps fully expanded (--depth -1) runs")
    sim.add_argument("--out", help="output prefix; writes PREFIX.json and PREFIX.csv")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="run the invariant suites")
    ver.add_argument("--level", choices=("quick", "full"), default="quick")
    ver.add_argument("--plan")
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "seed", 0) is None:
        args.seed = _default_seed()
    if getattr(args, "depth", None) is not None and args.depth < 0:
        args.depth = None
    np.set_printoptions(precision=6, suppress=True)
    try:
        return args.func(args)
    except HamdistError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
