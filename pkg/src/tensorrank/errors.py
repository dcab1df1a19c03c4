"""Exception hierarchy shared by every module."""


class TensorRankError(Exception):
    """Base class for all errors raised by the toolkit."""


class FieldMismatch(TensorRankError, ValueError):
    pass


class DivisionByZero(TensorRankError, ZeroDivisionError):
    pass


class DegreeTooLarge(TensorRankError):
    pass


class NoSuchRoot(TensorRankError):
    pass


class ShapeMismatch(TensorRankError, ValueError):
    pass


class OrderMismatch(ShapeMismatch):
    pass


class IndexOutOfRange(TensorRankError, IndexError):
    pass


class EmptySelection(TensorRankError, ValueError):
    pass


class InvalidSpec(TensorRankError, ValueError):
    pass


class InvalidModulus(InvalidSpec):
    pass


class InvalidParams(TensorRankError, ValueError):
    pass


class BudgetExceeded(TensorRankError):
    pass


class FieldTooSmall(TensorRankError):
    pass


class CharacteristicDividesOrder(TensorRankError):
    pass


class ValidationFailed(TensorRankError):
    pass


class EntriesNotInBaseField(TensorRankError):
    pass


class FieldNotOrdered(TensorRankError):
    pass


class NotPermutationTensor(TensorRankError):
    pass


class PreconditionViolated(TensorRankError):
    pass


class ParseError(TensorRankError, ValueError):
    """Malformed field literal, scalar, or text file."""
