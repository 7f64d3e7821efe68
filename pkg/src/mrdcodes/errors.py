"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class MRDError(Exception):
    """Base class for every error raised by this package."""


# fields
class NotPrime(MRDError, ValueError):
    pass


class ReducibleModulus(MRDError, ValueError):
    pass


class DegreeMismatch(MRDError, ValueError):
    pass


class FieldMismatch(MRDError, ValueError):
    pass


class DivisionByZero(MRDError, ZeroDivisionError):
    pass


class NotASubfieldOrder(MRDError, ValueError):
    pass


# matrices
class DimensionMismatch(MRDError, ValueError):
    pass


class Singular(MRDError, ValueError):
    pass


class TooLarge(MRDError, ValueError):
    pass


# codes
class TooSmall(MRDError, ValueError):
    pass


class ZeroNotInCode(MRDError, ValueError):
    pass


class NotSquare(MRDError, ValueError):
    pass


class NoInvertibleElement(MRDError, ValueError):
    pass


class NotLinear(MRDError, ValueError):
    pass


class BasisNotIndependent(MRDError, ValueError):
    pass


class BadCardinality(MRDError, ValueError):
    pass


# algebra
class NotASemifield(MRDError, ValueError):
    pass


class NotNormalized(MRDError, ValueError):
    pass


class NotMRD(MRDError, ValueError):
    pass


class KNotInKernel(MRDError, ValueError):
    pass


# classification
class ParameterMismatch(MRDError, ValueError):
    pass


class NoCommonKernel(MRDError, ValueError):
    pass


class BudgetExceeded(MRDError, RuntimeError):
    """Search stopped early; carries what was found so far and a resume token."""

    def __init__(self, message: str, partial=None, resume_token=None):
        super().__init__(message)
        self.partial = partial
        self.resume_token = resume_token


# forms
class ZeroScalar(MRDError, ValueError):
    pass


class NotInvariant(MRDError, ValueError):
    pass


class NotASubfield(MRDError, ValueError):
    pass


# constructions
class ConditionsViolated(MRDError, ValueError):
    pass


class UnknownFixture(MRDError, KeyError):
    pass


# serialization
class ParseError(MRDError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class ValidationError(MRDError, ValueError):
    pass
