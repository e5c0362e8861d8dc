"""Exception hierarchy.

Every domain error carries a stable ``code`` (its class name) so the CLI can
emit machine-readable error payloads.
"""

from __future__ import annotations


class TttError(Exception):
    """Base class for all domain errors raised by this package."""

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.details = details

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict:
        payload = {"error": self.code, "message": str(self)}
        if self.details:
            payload["details"] = self.details
        return payload


# graph
class GraphError(TttError):
    pass


class EmptyGraph(GraphError):
    pass


class UnknownNode(GraphError):
    pass


class DuplicateOrReversedEdge(GraphError):
    pass


class NotConnected(GraphError):
    pass


class DirectedCycle(GraphError):
    pass


class BlockNotComplete(GraphError):
    pass


class BlockNotTransitive(GraphError):
    pass


class PathBudgetExceeded(GraphError):
    pass


class NotUniqueSource(GraphError):
    pass


# model
class ModelError(TttError):
    pass


class WeightsMismatch(ModelError):
    pass


class WeightOutOfRange(ModelError):
    pass


class CriticalityViolated(ModelError):
    pass


class CriticalityTie(ModelError):
    pass


class NonPositiveDiagonal(ModelError):
    pass


class NegativeInput(ModelError):
    pass


class NonPositiveThreshold(ModelError):
    pass


class NotSingleChild(ModelError):
    pass


class LeavesParameterSpace(ModelError):
    pass


# laws / spectral / limits
class DimensionMismatch(TttError):
    pass


class EmptyU(TttError):
    pass


class AmbiguousSupport(TttError):
    pass


class EnumerationBudgetExceeded(TttError):
    pass


class NoApplicableCase(TttError):
    pass


# identify
class IdentifyError(TttError):
    pass


class InvalidLatentSet(IdentifyError):
    pass


class CriterionViolated(IdentifyError):
    pass


class CriterionSatisfied(IdentifyError):
    pass


class NoExitPath(IdentifyError):
    pass


class AtomCountMismatch(IdentifyError):
    pass


class UnresolvableTie(IdentifyError):
    pass


class InconsistentTable(IdentifyError):
    pass


# montecarlo
class TooFewExceedances(TttError):
    pass


class InvalidArgument(TttError):
    """A numeric argument outside its admissible range (sample size, quantile, ...)."""
