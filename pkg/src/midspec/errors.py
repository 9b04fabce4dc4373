"""Exception types shared across modules."""


class MidspecError(Exception):
    """Base class for all package errors."""


class InputError(MidspecError, ValueError):
    """Malformed or out-of-domain input."""


class NeutralTypeError(InputError):
    """Raised for m == n: neutral-type root counting is not implemented."""


class SingularityError(MidspecError, ValueError):
    """Evaluation at an excluded (singular) point of an ODE coefficient."""


class BranchCutError(MidspecError, ValueError):
    """Evaluation too close to a branch cut of a multivalued function."""


class ConvergenceError(MidspecError, ArithmeticError):
    """A series or iteration failed to converge; carries the partial result."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class BoundaryRootError(MidspecError, ArithmeticError):
    """A root sits on a contour even after perturbation."""


class InfeasibleError(MidspecError, ValueError):
    """No real solution exists for an assignment problem."""
