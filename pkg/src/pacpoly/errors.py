"""Exception types shared across the package."""


class PacPolyError(Exception):
    """Base class for all pacpoly errors."""


# -- parameter spaces and points ---------------------------------------------

class OutOfBox(PacPolyError):
    """A point lies outside the parameter box."""


class UnknownParam(PacPolyError):
    """A parameter name does not exist in the space."""


class MissingParam(PacPolyError):
    """A point assignment omits one or more parameters."""


# -- expression evaluation ----------------------------------------------------

class DivisionByZero(PacPolyError):
    """An expression denominator evaluates to zero at a point."""


class IntervalDivisionByZero(PacPolyError):
    """A denominator interval contains zero, so interval division is undefined."""


class ZeroDenominator(PacPolyError):
    """A rational function was built with a symbolically zero denominator."""


# -- models --------------------------------------------------------------------

class RowSumViolation(PacPolyError):
    """A transition row does not sum to one within tolerance."""


class NegativeProbability(PacPolyError):
    """A transition expression evaluates to a negative probability."""


class MissingReward(PacPolyError):
    """A formula references a reward structure the model does not define."""


# -- parsing -------------------------------------------------------------------

class ParseError(PacPolyError):
    """Syntax or semantic error in an input text, with a 1-based location."""

    def __init__(self, line, column, expected, found):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        super().__init__(f"{line}:{column}: expected {expected}, found {found!r}")


class BoundError(PacPolyError):
    """A probability bound lies outside [0, 1] or a reward bound is negative."""


# -- model checking ------------------------------------------------------------

class SingularSystem(PacPolyError):
    """The reachability linear system is singular; preprocessing is broken."""


# -- state elimination -----------------------------------------------------------

class TooLarge(PacPolyError):
    """The model exceeds the state cap for exact elimination."""


class SymbolicZeroDenominator(PacPolyError):
    """A 1 - selfloop factor is identically zero during elimination."""


class NotAlmostSure(PacPolyError):
    """Reward elimination requires the target to be reached with probability one."""


# -- scenario machinery ----------------------------------------------------------

class BadStatParam(PacPolyError):
    """A statistical parameter is outside its admissible range."""


class TooFewSamples(PacPolyError):
    """The sample set is smaller than the scenario bound requires."""


class LpFailure(PacPolyError):
    """The LP solver did not return an optimal solution."""


class OracleFailure(PacPolyError):
    """Evaluating the value oracle failed at a specific sample."""

    def __init__(self, index, cause):
        self.index = index
        self.cause = cause
        super().__init__(f"oracle failed at sample {index}: {cause}")


# -- analysis ----------------------------------------------------------------------

class BadNorm(PacPolyError):
    """The requested p-norm order is not >= 1."""


class QuadratureFailure(PacPolyError):
    """Numeric quadrature did not converge to the requested tolerance."""


class CenterSingular(PacPolyError):
    """A Taylor expansion center lies on (or too close to) a denominator zero."""
