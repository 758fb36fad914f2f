from selfroute.core.model.cost import CostFunction
from selfroute.core.model.evaluation import (
    perceived_path_cost,
    social_cost,
    true_path_cost,
    type_aggregate_cost,
)
from selfroute.core.model.flow import FlowAssignment
from selfroute.core.model.instance import Edge, GameInstance, UserType
from selfroute.core.model.io import load_instance, parse_instance
from selfroute.core.model.paths import enumerate_paths

__all__ = [
    "CostFunction",
    "Edge",
    "FlowAssignment",
    "GameInstance",
    "UserType",
    "enumerate_paths",
    "load_instance",
    "parse_instance",
    "perceived_path_cost",
    "social_cost",
    "true_path_cost",
    "type_aggregate_cost",
]
