"""Exception hierarchy.

Every mathematical failure raised by the library derives from
:class:`PadicError`.  Failures of a checked inequality additionally derive
from :class:`CertificationError` and carry both sides of the inequality as
value-group exponents, so callers (and the CLI) can report exactly which
bound was violated.
"""

from __future__ import annotations


class PadicError(Exception):
    """Base class for all library errors."""


class PrecisionError(PadicError):
    """Known digits are insufficient to decide a value or a comparison."""


class PadicZeroDivisionError(PadicError, ZeroDivisionError):
    pass


class PrimeError(PadicError, ValueError):
    pass


class NotASquareError(PadicError):
    pass


class RootOutsideQpError(PadicError):
    """A requested root exists over C_p but could not be produced in Q_p."""


class RootCountError(PadicError):
    """A disk does not contain the number of roots an operation needs."""

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


class CertificationError(PadicError):
    """A required inequality between norms fails.

    ``lhs`` and ``rhs`` are the two sides as radii; ``relation`` is the
    relation that was required to hold (``"<"``, ``"<="``, ``">"``...).
    """

    def __init__(self, message: str, lhs=None, relation: str | None = None, rhs=None):
        super().__init__(message)
        self.lhs = lhs
        self.relation = relation
        self.rhs = rhs

    def as_record(self) -> dict:
        rec = {"error": type(self).__name__, "message": str(self)}
        if self.relation is not None:
            rec["required"] = {
                "lhs": None if self.lhs is None else self.lhs.to_record(),
                "relation": self.relation,
                "rhs": None if self.rhs is None else self.rhs.to_record(),
            }
        return rec


class PreconditionError(CertificationError):
    pass


class NotExpandingError(CertificationError):
    pass


class CriticalPointError(CertificationError):
    pass


class BackwardInvarianceError(CertificationError):
    def __init__(self, message: str, escaping_disk=None, **kw):
        super().__init__(message, **kw)
        self.escaping_disk = escaping_disk


class PerturbationTooLargeError(CertificationError):
    def __init__(self, message: str, index: int | None = None, **kw):
        super().__init__(message, **kw)
        self.index = index


class NotRepellingError(CertificationError):
    pass


class EscapeError(PadicError):
    """An orbit left the region it was required to stay in."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step
