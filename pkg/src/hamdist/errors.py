"""Exception hierarchy. Each CLI-visible failure has a stable exit code."""


class HamdistError(Exception):
    exit_code = 1


class DimensionError(HamdistError, ValueError):
    pass


class NotHermitian(HamdistError, ValueError):
    pass


class NotTraceless(HamdistError, ValueError):
    pass


class NotUnitary(HamdistError, ValueError):
    pass


class NonzeroConstantTerm(HamdistError, ValueError):
    pass


class DecompositionResidual(HamdistError, ArithmeticError):
    pass


class NotDistinct(HamdistError, ValueError):
    exit_code = 3


class InfeasibleTargets(HamdistError, ValueError):
    exit_code = 4


class FunctionalCollision(HamdistError, ArithmeticError):
    exit_code = 5


class PlanVerificationFailed(HamdistError, ArithmeticError):
    exit_code = 6

    def __init__(self, message, index=None, deviation=None):
        super().__init__(message)
        self.index = index
        self.deviation = deviation


class BudgetTooSmall(HamdistError, ValueError):
    """The requested expansion would exceed the configured segment cap."""

    exit_code = 7


class SingularInterpolation(HamdistError, ArithmeticError):
    exit_code = 9


class ZeroC(HamdistError, ValueError):
    pass


class NonpositiveTime(HamdistError, ValueError):
    pass
