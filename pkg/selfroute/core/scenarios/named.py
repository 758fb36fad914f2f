"""
Small named instances with known equilibria.

Each builder splits a unit population into a certain type (theta1, r = 1) and
an uncertain type (theta2) holding the share epsilon with factor r.
"""

from fractions import Fraction

from selfroute.core.errors import InvalidEpsilon
from selfroute.core.model.cost import CostFunction
from selfroute.core.model.instance import Edge, GameInstance, UserType


def _two_commodity_types(epsilon: float, r: float, demand: float, sink: str = "t") -> list:
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidEpsilon(epsilon)
    return [
        UserType("theta1", "s", sink, (1.0 - epsilon) * demand, 1.0),
        UserType("theta2", "s", sink, epsilon * demand, r),
    ]


def build_pigou(epsilon: float = 0.0, r: float = 3.0, demand: float = 1.0) -> GameInstance:
    """
    Two parallel links: e1 with cost 0.25x + 2.5 and e2 with cost x.

    For r = 3 and epsilon <= 2/15 every uncertain user takes e1 and the cost is
    1 + 0.5 epsilon + 1.25 epsilon^2; beyond that 2/15 of the population
    settles on e1.

    Raises:
        InvalidEpsilon: Unless 0 <= epsilon <= 1
    """
    edges = [
        Edge("e1", "s", "t", CostFunction(0.25, 2.5)),
        Edge("e2", "s", "t", CostFunction(1.0, 0.0)),
    ]
    return GameInstance.build(["s", "t"], edges, _two_commodity_types(epsilon, r, demand))


FIG3_PATHS = (("e1",), ("e2", "e3"), ("e2", "e5"), ("e4", "e3"), ("e4", "e5"))


def build_fig3(epsilon: float = 0.0, r: float = 2.0) -> GameInstance:
    """
    Series-parallel network that is not serially linearly independent.

    e1 joins s and t directly; e2, e4 lead from s to i and e3, e5 from i to t.
    Catalogs are listed in the order p1 (e1), p2 (e2 e3), p3 (e2 e5),
    p4 (e4 e3), p5 (e4 e5).
    """
    edges = [
        Edge("e1", "s", "t", CostFunction(5.0, 2.0)),
        Edge("e2", "s", "i", CostFunction(1.0, 0.0)),
        Edge("e3", "i", "t", CostFunction(1.5, 1.5)),
        Edge("e4", "s", "i", CostFunction(0.0, float(Fraction(23, 15)))),
        Edge("e5", "i", "t", CostFunction(3.0, 1.0)),
    ]
    types = _two_commodity_types(epsilon, r, 1.0)
    return GameInstance.build(
        ["s", "i", "t"], edges, types, paths={t.id: FIG3_PATHS for t in types}
    )


def build_braess(epsilon: float = 0.0, r: float = 1.0) -> GameInstance:
    """
    The Wheatstone network with Braess costs: x on e1 and e4, 1 on e2 and e3,
    a free bridge e5 from v to w. With certain users all flow takes e1 e5 e4.
    """
    edges = [
        Edge("e1", "s", "v", CostFunction(1.0, 0.0)),
        Edge("e2", "v", "t", CostFunction(0.0, 1.0)),
        Edge("e3", "s", "w", CostFunction(0.0, 1.0)),
        Edge("e4", "w", "t", CostFunction(1.0, 0.0)),
        Edge("e5", "v", "w", CostFunction(0.0, 0.0)),
    ]
    return GameInstance.build(["s", "v", "w", "t"], edges, _two_commodity_types(epsilon, r, 1.0))
