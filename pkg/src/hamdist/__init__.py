"""Plan and simulate discrimination of n candidate Hamiltonians on C^n."""
from .errors import (BudgetTooSmall, DecompositionResidual, DimensionError, FunctionalCollision,
                     HamdistError, InfeasibleTargets, NonpositiveTime, NonzeroConstantTerm, NotDistinct,
                     NotHermitian, NotTraceless, PlanVerificationFailed, SingularInterpolation, ZeroC)
from .gadgets import Budgets, GateSequence, evaluate, evaluate_ideal, evaluate_trotter
from .lie import build_basis, expm_i, from_coords, to_coords
from .precompute import DiscriminationInstance, PrecomputePlan, make_instance, make_plan, verify_plan
from .protocol import SimulationResult, fourier_basis, paper_example, run_direct_example, run_discrimination
from .superop import ConjugationDecomposition, SuperOp, decompose_into_conjugations

__version__ = "0.1.0"
