"""
Exceptions raised by the selfroute library.

Every error derives from SelfRouteError so callers (the CLI in particular) can
separate bad input from programming errors. Errors keep the offending values as
attributes next to the readable message.
"""

from typing import Any, Optional


class SelfRouteError(Exception):
    """Base class for all selfroute errors."""


class InvalidInstance(SelfRouteError):
    """A game instance violates a construction invariant."""


class InstanceFormatError(SelfRouteError):
    """An instance document could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class PathExplosion(SelfRouteError):
    def __init__(self, cap: int, source: Any = None, sink: Any = None):
        self.cap = cap
        self.source = source
        self.sink = sink
        super().__init__(f"More than {cap} simple paths from {source} to {sink}")


class NoPath(SelfRouteError):
    def __init__(self, source: Any, sink: Any):
        self.source = source
        self.sink = sink
        super().__init__(f"No path from {source} to {sink}")


class MissingUncertainty(SelfRouteError):
    def __init__(self, type_id: Any, edge_id: Any):
        self.type_id = type_id
        self.edge_id = edge_id
        super().__init__(f"User type {type_id} has no uncertainty factor for edge {edge_id}")


class InfeasibleFlow(SelfRouteError):
    """Path flows are negative or do not sum to the type's demand."""


class NotPotentialCompatible(SelfRouteError):
    def __init__(self, diagnosis: str, edge_id: Any = None):
        self.diagnosis = diagnosis
        self.edge_id = edge_id
        super().__init__(diagnosis)


class DidNotConverge(SelfRouteError):
    def __init__(self, iterations: int, gap: float):
        self.iterations = iterations
        self.gap = gap
        super().__init__(f"Solver stopped after {iterations} iterations with duality gap {gap:.3e}")


class TooManyPaths(SelfRouteError):
    def __init__(self, count: int, limit: int):
        self.count = count
        self.limit = limit
        super().__init__(f"Brute force supports at most {limit} paths in total, instance has {count}")


class InvalidNetwork(SelfRouteError):
    """A two-terminal network is disconnected or has edges on no s-t path."""


class TopologyMismatch(SelfRouteError):
    """A check was requested on a network outside its topology hypothesis."""


class BoundUndefined(SelfRouteError):
    """The analytic price-of-anarchy bound is outside its validity region."""


class InvalidEpsilon(SelfRouteError):
    def __init__(self, epsilon: float):
        self.epsilon = epsilon
        super().__init__(f"Uncertain population share must lie in [0, 1], got {epsilon}")


class SpecInvalid(SelfRouteError):
    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"Invalid parking spec field '{field}': {reason}")


class CheckPreconditionError(SelfRouteError):
    """An instance does not have the shape a check needs (type count, scalar r, ...)."""
