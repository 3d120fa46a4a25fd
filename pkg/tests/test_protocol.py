import numpy as np
import pytest

from hamdist.errors import BudgetTooSmall
from hamdist.gadgets import Budgets, evaluate_ideal
from hamdist.lie import PAULI_X, PAULI_Z, expm_i, random_hermitian, shifted_diag
from hamdist.precompute import make_instance, make_plan
from hamdist.protocol import (fourier_basis, measure, paper_example, protocol_spec, run_direct_example,
                              run_discrimination, uniform_state)


@pytest.fixture(scope="module")
def sz_sx():
    inst = make_instance([PAULI_Z, PAULI_X])
    return inst, make_plan(inst, seed=0)


def check_invariants(res):
    np.testing.assert_allclose(np.diag(res.gram).real, 1.0, atol=1e-10)
    np.testing.assert_allclose(res.confusion.sum(axis=0), 1.0, atol=1e-10)


def test_fourier_basis_n2_states():
    F = fourier_basis(2)
    np.testing.assert_allclose(F[1], np.array([-1j, 1j]) / np.sqrt(2), atol=1e-15)
    # the m = 2 target wraps onto row 0 up to a global phase
    m2 = expm_i(shifted_diag(2), 2 * np.pi) @ uniform_state(2)
    np.testing.assert_allclose(m2, np.array([-1, -1]) / np.sqrt(2), atol=1e-15)
    assert abs(np.vdot(F[1], m2)) <= 1e-15


@pytest.mark.parametrize("n", [2, 3, 4])
def test_fourier_basis_orthonormal(n):
    F = fourier_basis(n)
    assert np.max(np.abs(F.conj() @ F.T - np.eye(n))) <= 1e-12


def test_diagonal_family_instance():
    inst = paper_example(3)
    np.testing.assert_allclose(inst.hamiltonians[1] - inst.hamiltonians[0], np.diag([1, 2, 3]))
    with pytest.raises(ValueError):
        paper_example(1)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_direct_example_is_perfect(n):
    res = run_direct_example(n)
    assert res.success == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(res.gram - np.eye(n))) <= 1e-12
    assert res.declared == list(range(n))
    check_invariants(res)


def test_ideal_sz_sx(sz_sx):
    inst, plan = sz_sx
    res = run_discrimination(inst, plan, "ideal")
    assert res.success >= 1 - 1e-6
    assert abs(res.gram[0, 1]) <= 1e-6
    assert res.declared == [0, 1]
    check_invariants(res)


@pytest.mark.parametrize("n", [2, 3])
def test_plan_spec_reaches_target_unitary(n):
    plan = make_plan(paper_example(n), seed=0)
    spec = protocol_spec(plan)
    for j, H in enumerate(plan.instance.hamiltonians):
        U = evaluate_ideal(spec, H)
        V = expm_i(plan.Dprime, plan.targets[j] * 2 * np.pi / n)
        phase = np.vdot(V.ravel(), U.ravel()) / n
        assert abs(abs(phase) - 1) <= 1e-8
        assert np.max(np.abs(U - phase * V)) <= 1e-8


def test_ideal_random_instances():
    rng = np.random.default_rng(77)
    for i in range(5):
        inst = make_instance([random_hermitian(3, rng) for _ in range(3)])
        res = run_discrimination(inst, make_plan(inst, seed=i), "ideal")
        assert res.success >= 1 - 1e-6
        check_invariants(res)


def test_trotter_improves_with_budget(sz_sx):
    inst, plan = sz_sx
    succ = [run_discrimination(inst, plan, "trotter", Budgets(m=m, k=m, depth=1)).success for m in (4, 8, 16, 32)]
    assert succ[2] >= succ[0] and succ[3] >= succ[1]
    assert succ[-1] >= 0.99
    res = run_discrimination(inst, plan, "trotter", Budgets(m=8, k=8, depth=1))
    check_invariants(res)
    assert res.budgets.m == 8
    assert res.costs[0].ideal_blocks > 0


def test_additive_constants_do_not_change_statistics(sz_sx):
    inst, plan = sz_sx
    shifted = make_instance([PAULI_Z + 2.5 * np.eye(2), PAULI_X - 7 * np.eye(2)])
    for mode, b in (("ideal", None), ("trotter", Budgets(m=8, k=8, depth=1))):
        a = run_discrimination(inst, plan, mode, b)
        c = run_discrimination(shifted, plan, mode, b)
        assert np.max(np.abs(a.confusion - c.confusion)) <= 1e-10


def test_budget_cap(sz_sx):
    inst, plan = sz_sx
    with pytest.raises(BudgetTooSmall):
        run_discrimination(inst, plan, "trotter", Budgets(m=8, k=8, depth=None, cap=1000))
    with pytest.raises(ValueError):
        run_discrimination(inst, plan, "exact")


def test_measure_flags_swapped_states():
    F = fourier_basis(2)
    _, confusion, success = measure(F[[0, 1]], [1, 2])
    assert success == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(confusion, np.eye(2), atol=1e-15)
