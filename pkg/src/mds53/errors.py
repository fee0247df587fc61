"""
Exceptions raised by mds53.

Every error derives from MDSError, and most also derive from the built-in a
caller would naturally catch (ValueError, ZeroDivisionError).
"""


class MDSError(Exception):
    """Base class for everything mds53 raises on purpose."""


# Field arithmetic
class FieldError(MDSError, ValueError):
    """Bad field description or an element outside its field."""


class FieldMismatchError(FieldError):
    """Two operands belong to different fields."""


class FieldZeroDivisionError(FieldError, ZeroDivisionError):
    """Inverse of zero requested."""


# Linear algebra
class LinalgError(MDSError, ValueError):
    """Shape or rank precondition of a matrix operation not met."""


class SingularMatrixError(LinalgError):
    pass


class InconsistentSystemError(LinalgError):
    pass


# Code construction, decode, repair
class InvalidParamsError(MDSError, ValueError):
    """Parameters violate one or more design conditions."""

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = list(violations or [])


class DecodeError(MDSError):
    pass


class RepairError(MDSError):
    pass


class OracleError(MDSError, ValueError):
    pass


# Storage
class ClusterError(MDSError):
    pass


class NodeFormatError(ClusterError):
    """A node file is truncated, has a bad magic or an unknown version."""


class UsageError(MDSError):
    """Bad command-line input."""
