import logging
from dataclasses import dataclass, field

import numpy as np

from selfroute.core.errors import MissingUncertainty
from selfroute.core.model.evaluation import perceived_path_costs
from selfroute.core.model.flow import FlowAssignment
from selfroute.core.model.instance import GameInstance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Violation:
    type_id: str
    path_index: int
    path: tuple
    excess: float  # perceived cost above the type's cheapest path


@dataclass(frozen=True)
class EquilibriumReport:
    passed: bool
    worst_violation: float
    tol: float
    violations: tuple = field(default_factory=tuple)
    message: str = ""

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "worst_violation": self.worst_violation,
            "tol": self.tol,
            "violations": [
                {
                    "type": v.type_id,
                    "path_index": v.path_index,
                    "path": list(v.path),
                    "excess": v.excess,
                }
                for v in self.violations
            ],
            "message": self.message,
        }


def verify_equilibrium(
    instance: GameInstance, flow: FlowAssignment, tol: float = 1e-6
) -> EquilibriumReport:
    """
    Check the Wardrop conditions under perceived costs.

    A path carrying more than tol * demand of a type must cost that type no
    more than its cheapest path plus tol * (1 + cheapest cost). Verification
    never raises: an undefined perceived cost is reported as a failure.

    Args:
        instance: The game the flow is checked against
        flow: Path flows, possibly computed on another instance
        tol: Relative tolerance

    Returns:
        EquilibriumReport: Outcome with every violating (type, path)
    """
    if flow.instance is not instance:
        flow = FlowAssignment(instance, dict(flow.path_flows), validate=False)

    violations = []
    worst = 0.0
    for user_type in instance.types:
        try:
            costs = perceived_path_costs(flow, user_type.id)
        except MissingUncertainty as e:
            logger.warning(f"Cannot verify equilibrium: {e}")
            return EquilibriumReport(False, float("inf"), tol, (), str(e))

        path_flows = flow.path_flows[user_type.id]
        cheapest = float(costs.min())
        used = path_flows > tol * user_type.demand
        if not used.any():
            continue
        excess = np.where(used, costs - cheapest, 0.0)
        worst = max(worst, float(excess.max()))
        allowance = tol * (1.0 + abs(cheapest))
        for index in np.flatnonzero(excess > allowance):
            violations.append(
                Violation(
                    user_type.id,
                    int(index),
                    instance.paths(user_type.id)[index],
                    float(excess[index]),
                )
            )

    passed = not violations
    message = "" if passed else f"{len(violations)} used paths are not cheapest for their type"
    return EquilibriumReport(passed, worst, tol, tuple(violations), message)
