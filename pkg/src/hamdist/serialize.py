"""JSON and CSV formats.

Matrices everywhere are lists of rows whose entries are ``[re, im]`` pairs.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile

import numpy as np

from .errors import DimensionError, PlanVerificationFailed
from .gadgets import ApplyKnown, Cost, GateSequence, Wait
from .precompute import PrecomputePlan, make_instance
from .superop import ConjugationDecomposition

PLAN_FORMAT = "hamdist-plan/1"


def matrix_to_literal(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_literal(rows) -> np.ndarray:
    try:
        M = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"malformed matrix literal: {exc}") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"matrix literal is not square: shape {M.shape}")
    return M


def vector_to_literal(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + "\n"


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` in one rename so readers never see a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


# --- instances ---------------------------------------------------------------

def instance_to_dict(inst) -> dict:
    return {"n": inst.n, "hamiltonians": [matrix_to_literal(H) for H in inst.hamiltonians]}


def instance_from_dict(d: dict):
    hs = [matrix_from_literal(m) for m in d["hamiltonians"]]
    inst = make_instance(hs)
    if "n" in d and int(d["n"]) != inst.n:
        raise DimensionError(f"instance declares n={d['n']} but matrices have dim {inst.n}")
    return inst


# --- decompositions ----------------------------------------------------------

def decomposition_to_dict(dec: ConjugationDecomposition) -> dict:
    return {
        "terms": [{"c": float(c), "U": matrix_to_literal(U)} for c, U in dec.terms],
        "residual": float(dec.residual),
        "seed": dec.seed,
        "dict_size": dec.dict_size,
        "generator": dec.generator,
    }


def decomposition_from_dict(d: dict) -> ConjugationDecomposition:
    terms = d["terms"]
    return ConjugationDecomposition(
        np.array([float(t["c"]) for t in terms]),
        np.array([matrix_from_literal(t["U"]) for t in terms]),
        float(d["residual"]), seed=d.get("seed"), dict_size=d.get("dict_size"),
        generator=d.get("generator", "numpy.random.PCG64"),
    )


# --- plans -------------------------------------------------------------------

def plan_to_dict(plan: PrecomputePlan) -> dict:
    return {
        "format": PLAN_FORMAT,
        "n": plan.n,
        "seed": plan.seed,
        "instance": instance_to_dict(plan.instance),
        "G": matrix_to_literal(plan.G),
        "functional": matrix_to_literal(plan.functional),
        "lambdas": [float(x) for x in plan.lambdas],
        "sign_pairs": [list(map(int, p)) for p in plan.sign_pairs],
        "targets": [int(m) for m in plan.targets],
        "poly": [float(b) for b in plan.poly],
        "A": matrix_to_literal(plan.A),
        "C": matrix_to_literal(plan.C),
        "Dprime": matrix_to_literal(plan.Dprime),
        "L_decomp": decomposition_to_dict(plan.L_decomp),
        "Ltilde_decomp": decomposition_to_dict(plan.Ltilde_decomp),
    }


def plan_from_dict(d: dict) -> PrecomputePlan:
    """Rebuild a plan; malformed content surfaces as :class:`PlanVerificationFailed`."""
    if not isinstance(d, dict) or d.get("format") != PLAN_FORMAT:
        raise PlanVerificationFailed(f"not a {PLAN_FORMAT} document")
    try:
        return PrecomputePlan(
            instance=instance_from_dict(d["instance"]),
            seed=int(d["seed"]),
            G=matrix_from_literal(d["G"]),
            functional=matrix_from_literal(d["functional"]),
            lambdas=np.array(d["lambdas"], dtype=float),
            sign_pairs=[list(p) for p in d.get("sign_pairs", [])],
            targets=[int(m) for m in d["targets"]],
            poly=np.array(d["poly"], dtype=float),
            A=matrix_from_literal(d["A"]),
            C=matrix_from_literal(d["C"]),
            Dprime=matrix_from_literal(d["Dprime"]),
            L_decomp=decomposition_from_dict(d["L_decomp"]),
            Ltilde_decomp=decomposition_from_dict(d["Ltilde_decomp"]),
        )
    except (KeyError, TypeError, ValueError, IndexError, DimensionError) as exc:
        raise PlanVerificationFailed(f"plan file is malformed: {exc!r}") from None


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


# --- gate sequences ----------------------------------------------------------

def segment_to_dict(seg) -> dict:
    if isinstance(seg, ApplyKnown):
        return {"op": "apply", "U": matrix_to_literal(seg.U)}
    if isinstance(seg, Wait):
        return {"op": "wait", "t": float(seg.t)}
    raise TypeError(f"only physical segments serialize, got {seg!r}")


def write_sequence(segments, fh) -> int:
    """Stream a JSON array of segments to ``fh`` one element at a time."""
    count = 0
    fh.write("[")
    for seg in segments:
        fh.write(",\n" if count else "\n")
        fh.write(json.dumps(segment_to_dict(seg)))
        count += 1
    fh.write("\n]\n" if count else "]\n")
    return count


def read_sequence(fh, n: int) -> GateSequence:
    segs = []
    for d in json.load(fh):
        if d["op"] == "apply":
            segs.append(ApplyKnown(matrix_from_literal(d["U"])))
        elif d["op"] == "wait":
            segs.append(Wait(float(d["t"])))
        else:
            raise ValueError(f"unknown op {d['op']!r}")
    return GateSequence(n, tuple(segs))


def cost_to_dict(c: Cost) -> dict:
    return {"applies": c.applies, "waits": c.waits, "total_wait_time": c.total_wait_time,
            "ideal_blocks": c.ideal_blocks}


# --- simulation results ------------------------------------------------------

def result_to_dict(res) -> dict:
    out = {
        "mode": res.mode,
        "n": res.n,
        "targets": [int(m) for m in res.targets],
        "success": float(res.success),
        "declared": res.declared,
        "gram": matrix_to_literal(res.gram),
        "confusion": [[float(x) for x in row] for row in res.confusion],
        "final_states": [vector_to_literal(v) for v in res.final_states],
        "costs": [cost_to_dict(c) for c in res.costs],
    }
    if res.budgets is not None:
        b = res.budgets
        out["budgets"] = {"m": b.m, "k": b.k, "depth": b.depth, "cap": b.cap,
                          "symmetric_reversal": b.symmetric_reversal}
    return out


def results_to_csv(results) -> str:
    """One row per (result, hypothesis): outcome probabilities, declaration, costs."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = results[0].n
    w.writerow(["mode", "m", "k", "depth", "hypothesis", "target", "declared", "p_correct"]
               + [f"p_outcome_{i}" for i in range(n)]
               + ["applies", "waits", "total_wait_time", "ideal_blocks"])
    for res in results:
        b = res.budgets
        budget_cols = [b.m, b.k, "" if b.depth is None else b.depth] if b else ["", "", ""]
        declared = res.declared
        for j, m in enumerate(res.targets):
            c = res.costs[j]
            w.writerow([res.mode, *budget_cols, j + 1, m, declared[j] + 1,
                        repr(float(res.confusion[m % n, j]))]
                       + [repr(float(x)) for x in res.confusion[:, j]]
                       + [c.applies, c.waits, repr(float(c.total_wait_time)), c.ideal_blocks])
    return buf.getvalue()
