"""Exception hierarchy for vmlattice.

None of these derive from ValueError so that they pass through pydantic
validators untouched instead of being folded into a ValidationError.
"""


class VmLatticeError(Exception):
    """Base class for every error raised by this package."""


class InputError(VmLatticeError):
    """Invalid input or a domain violation (CLI exit code 2)."""


class NotInvertible(InputError, ArithmeticError):
    """An integer has no multiplicative inverse modulo N."""


class NotPrime(InputError):
    """An operation that needs a prime modulus received a composite one."""


class DomainError(InputError):
    """An argument lies outside the domain of a function."""


class PoleError(InputError, ArithmeticError):
    """A function was evaluated at one of its poles."""


class DimensionError(InputError):
    """Dimension mismatch, or an operation defined only for a given s."""


class WeightSumError(InputError):
    """Cubature weights do not sum to one."""


class LengthMismatch(InputError):
    """Vectors that must have equal lengths do not."""


class FibonacciOverflow(InputError, OverflowError):
    """Fibonacci number outside the 64-bit signed integer range."""


class InvalidRule(InputError):
    """A lattice rule violates its construction constraints."""


class ProblemTooLarge(InputError):
    """N exceeds the size the closed-form evaluators can hold in memory."""


class NumericalConsistencyError(VmLatticeError):
    """Two independent evaluations disagree beyond tolerance (CLI exit code 3)."""
