"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes, so every domain failure should raise one
of the subclasses below instead of a bare ``ValueError``.
"""


class DesignError(Exception):
    """Base class for all library errors."""


class DomainError(DesignError, ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeError(DomainError):
    """Matrix has the wrong shape or is not Hermitian."""


class NotPSDError(DomainError):
    """Matrix has a negative eigenvalue beyond tolerance."""


class SingularityError(DomainError):
    """Matrix expected to be positive definite is singular."""


class ManifoldMismatchError(DesignError, TypeError):
    """Point, design and model live on different manifolds."""


class InfeasibleDesignError(DesignError):
    """range(K) is not contained in range(M); C_K(mu) is undefined."""


class PreconditionError(DesignError):
    """Caller violated a documented precondition (e.g. unequal weights)."""


class ConstructionError(DesignError):
    """A numerical construction did not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DesignParseError(DesignError):
    """Malformed line in a design file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DesignDataError(DesignError):
    """Design file parsed but its contents are unusable."""
