"""Exception hierarchy shared by every module of the package."""


class ConstraintHessianError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolation(ConstraintHessianError, ValueError):
    """An input breaks a structural contract (shape, symmetry, tangency)."""


class ParameterError(ConstraintHessianError, ValueError):
    """A scalar parameter is outside its admissible range."""


class SingularGramianError(ConstraintHessianError, ArithmeticError):
    """The constraint Gramian is (numerically) singular at the point."""


class OffManifoldError(ConstraintHessianError, ValueError):
    """A point expected on the constraint manifold lies off it."""


class NoCriticalSetError(ConstraintHessianError, ArithmeticError):
    """The quartic defining a family of critical points has no admissible root."""

    def __init__(self, alpha, message=None):
        self.alpha = alpha
        super().__init__(message or f"no admissible positive root for alpha={alpha!r}")
