"""Exception hierarchy shared by every qmckit module."""


class QMCError(Exception):
    """Base class for all qmckit errors."""


class UsageError(QMCError, ValueError):
    """Invalid combination of arguments (e.g. a criterion paired with the wrong sampler)."""


class CapacityError(QMCError):
    """Request exceeds what the generating data supports (index range, dimension)."""


class ParseError(QMCError, ValueError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class DomainError(QMCError, ValueError):
    """Parameter outside the mathematical domain of the operation."""


class FactorizationError(DomainError):
    """Covariance matrix cannot be factored as requested."""


class BoundaryError(DomainError):
    """A unit-cube point sits on the boundary where an inverse CDF is infinite."""

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message if index is None else f"{message} (point index {index})")


class WeightError(QMCError):
    """A density in the transform ladder vanished at a sampled point."""

    def __init__(self, step, index):
        self.step = step
        self.index = index
        super().__init__(f"zero density in step {step!r} at point index {index}")
