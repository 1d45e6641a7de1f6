"""Exception types shared across the library."""


class CarlitzError(Exception):
    """Base class for all library-specific failures."""


class PrecisionError(CarlitzError, ArithmeticError):
    """A result cannot be produced at the tracked precision.

    Raised instead of silently returning fewer correct coefficients than
    requested.  The message states what precision would be required when
    that can be estimated.
    """


class DivergenceError(CarlitzError, ArithmeticError):
    """A series was evaluated outside its domain of convergence."""


class ReconstructionError(CarlitzError):
    """An embedded element could not be certified as an exact global element."""


class RankError(CarlitzError):
    """A lattice or module failed to reach its predicted rank."""


class StabilizationError(CarlitzError):
    """An iterative enlargement did not stabilize within resource limits."""
