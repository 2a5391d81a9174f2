"""Exception hierarchy and warnings for the topamp package."""


class TopampError(Exception):
    """Base class for all package-specific errors."""


class NonPositiveParameter(TopampError, ValueError):
    """A physical quantity that must be strictly positive is not."""


class NegativeDrive(TopampError, ValueError):
    """Drive parameter below zero where a non-negative value is required."""


class SolverTolerance(TopampError, RuntimeError):
    """A root solver failed to reach its required residual."""


class DimensionMismatch(TopampError, ValueError):
    """Array lengths inconsistent with the lattice size."""


class EigenSolverFailure(TopampError, RuntimeError):
    """Dense eigen-decomposition did not converge."""


class SvdFailure(TopampError, RuntimeError):
    """Singular value decomposition did not converge."""


class SingularMatrix(TopampError, RuntimeError):
    """omega - H is numerically singular (marginal stability)."""


class NotTopological(TopampError, RuntimeError):
    """Edge-state extraction requested outside the topological phase."""


class DegenerateFit(TopampError, ValueError):
    """Localization fit window contains fewer than three sites."""


class IntegrationNotConverged(TopampError, RuntimeError):
    """Noise quadrature failed its refinement or tail criterion."""


class AllUnstable(TopampError, RuntimeError):
    """Every disorder realization at a sweep point was unstable."""


class NoOnset(TopampError, RuntimeError):
    """No instability onset found within the sigma schedule."""


class ParseError(TopampError, ValueError):
    """Configuration file could not be parsed; carries line context."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


class ValidationError(TopampError, ValueError):
    """Configuration value failed validation; names the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class SchemaMismatch(TopampError, ValueError):
    """Rows handed to the dataset writer do not match the declared schema."""


class UnsupportedSchema(TopampError, ValueError):
    """Plot renderer cannot interpret the dataset columns."""


class ImpedanceMismatchWarning(UserWarning):
    """Auxiliary-chain boundary decay is not matched to 2 J_b."""


class LowFluxWarning(UserWarning):
    """Mean displacement approaches the low-flux validity bound."""
