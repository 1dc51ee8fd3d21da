"""
Exception hierarchy for cardylab.

Two families, mapped to CLI exit codes by main.py:
    ValidationError  → exit 2 (bad input, nothing written)
    BudgetExceeded   → exit 3 (a numeric cap was hit; raise the cap in config.yaml)
"""


class CardyLabError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CardyLabError, ValueError):
    pass


class BudgetExceeded(CardyLabError, RuntimeError):
    pass


# ── tri-lattice ─────────────────────────────────────────────────────────────
class EmptyApproximation(ValidationError):
    pass


class UnknownVertex(ValidationError):
    pass


class SamePosition(ValidationError):
    pass


# ── planar-map ──────────────────────────────────────────────────────────────
class ZeroInnerVertices(ValidationError):
    pass


class CapExceeded(BudgetExceeded):
    pass


class TailCutoffExceeded(BudgetExceeded):
    pass


# ── percolation ─────────────────────────────────────────────────────────────
class BoundaryConditionMismatch(ValidationError):
    pass


class InconsistentLoops(ValidationError):
    pass


class TooManyVertices(BudgetExceeded):
    pass


# ── cardy-embed ─────────────────────────────────────────────────────────────
class NegativeInput(ValidationError):
    pass


class QueryTooCloseToCorner(ValidationError):
    pass


# ── pivotal ─────────────────────────────────────────────────────────────────
class BoundaryVertex(ValidationError):
    pass


class VertexOutsideBox(ValidationError):
    pass


# ── gaussian-field ──────────────────────────────────────────────────────────
class RegularizationTooFine(ValidationError):
    pass


class SingularLaplacian(ValidationError):
    pass


# ── dynamics ────────────────────────────────────────────────────────────────
class ZeroTotalRate(ValidationError):
    pass


class TooManyStates(BudgetExceeded):
    pass
