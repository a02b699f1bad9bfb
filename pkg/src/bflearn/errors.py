"""Exception types shared across the package.

Every failure mode raised on purpose derives from BflearnError so callers
(and the command line front end) can distinguish bad input from bugs.
"""


class BflearnError(Exception):
    """Base class for all errors raised deliberately by this package."""


class ExprSyntaxError(BflearnError):
    """Raised when order-expression text does not conform to the grammar.

    Carries the character position of the offending token.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class VocabularyMismatchError(BflearnError):
    """Two snapshots or structures do not share a vocabulary."""


class VariantMismatchError(BflearnError):
    """Two descriptors belong to different descriptor classes."""


class LengthMismatchError(BflearnError):
    """Tuples supplied to a game or profile have inconsistent lengths."""


class UnsupportedError(BflearnError):
    """The requested operation is outside the supported fragment."""


class BoundExceededError(BflearnError):
    """A requested stage, depth, or node budget was exceeded."""


class InfiniteInputError(BflearnError):
    """A finite-only operation received an infinite object."""


class PreconditionError(BflearnError):
    """An operation's documented precondition does not hold."""


class UsageError(BflearnError):
    """Bad command line arguments or malformed input files."""
