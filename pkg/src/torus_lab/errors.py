"""Exception hierarchy shared by every module."""


class TorusLabError(Exception):
    """Base class for all library errors."""


class BandLimitError(TorusLabError, ValueError):
    """A frequency lies outside the representable band of a grid."""


class ParameterError(TorusLabError, ValueError):
    """An argument violates an operation's precondition."""


class ShapeError(TorusLabError, ValueError):
    """Functions live on incompatible grids."""


class ResolutionError(TorusLabError, ValueError):
    """The grid is too coarse for the requested construction."""


class InvalidFamily(TorusLabError, ValueError):
    """A polynomial family failed validation.

    ``reason`` is ``"constant"``, ``"degrees"`` or ``"empty"``.
    """

    def __init__(self, reason, message):
        super().__init__(message)
        self.reason = reason


class DegenerateFamily(TorusLabError, ValueError):
    """The coefficient matrix of a family is rank deficient."""


class DegenerateFit(TorusLabError, ValueError):
    """A decay fit was requested on identically vanishing errors."""


class BudgetError(TorusLabError, RuntimeError):
    """A quadrature or direct summation would exceed its cost cap.

    ``required`` is the node (or term) count the request would have needed,
    ``cap`` the limit in force.  ``partial`` optionally carries whatever was
    computed before the abort.
    """

    def __init__(self, required, cap, what="nodes", partial=None):
        super().__init__(f"{what} budget exceeded: required {required}, cap {cap}")
        self.required = int(required)
        self.cap = int(cap)
        self.partial = partial


class ConfigError(TorusLabError, ValueError):
    """An experiment configuration failed schema validation."""
