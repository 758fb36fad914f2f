"""
True, perceived, social and per-type aggregate cost evaluation.
"""

import numpy as np

from selfroute.core.errors import MissingUncertainty
from selfroute.core.model.flow import FlowAssignment
from selfroute.core.model.instance import GameInstance, UserType
from selfroute.core.model.paths import Path


def _path_columns(instance: GameInstance, path: Path) -> list:
    return [instance.edge_index[edge_id] for edge_id in path]


def true_path_cost(flow: FlowAssignment, path: Path) -> float:
    """Sum of true edge costs a*x^d + b along the path."""
    instance = flow.instance
    costs = instance.edge_costs(flow.total_edge_flows)
    return float(costs[_path_columns(instance, path)].sum())


def perceived_path_cost(flow: FlowAssignment, path: Path, user_type: UserType) -> float:
    """
    Path cost as a user of the given type perceives it: sum of r(e)*a*x^d + b.

    Raises:
        MissingUncertainty: If the type's per-edge map omits an edge of the path
    """
    instance = flow.instance
    x = flow.total_edge_flows
    total = 0.0
    for edge_id in path:
        i = instance.edge_index[edge_id]
        r = user_type.r_on(edge_id)
        total += r * instance.a[i] * x[i] ** instance.degree + instance.b[i]
    return float(total)


def perceived_path_costs(flow: FlowAssignment, type_id: str) -> np.ndarray:
    """
    Perceived cost of every catalog path of a type.

    Raises:
        MissingUncertainty: If an edge of the catalog has no factor for this type
    """
    instance = flow.instance
    row = instance.uncertainty_matrix[instance.type_index[type_id]]
    incidence = instance.incidence[type_id]
    used = incidence.any(axis=0)
    missing = used & np.isnan(row)
    if missing.any():
        raise MissingUncertainty(type_id, instance.edge_ids[int(np.argmax(missing))])
    edge_costs = np.where(
        used,
        np.nan_to_num(row) * instance.a * np.power(flow.total_edge_flows, instance.degree)
        + instance.b,
        0.0,
    )
    return incidence @ edge_costs


def true_path_costs(flow: FlowAssignment, type_id: str) -> np.ndarray:
    instance = flow.instance
    return instance.incidence[type_id] @ instance.edge_costs(flow.total_edge_flows)


def social_cost(instance: GameInstance, flow: FlowAssignment) -> float:
    """Total true cost sum_e C_e(x_e) * x_e; perceptions never enter."""
    x = flow.total_edge_flows
    return float(np.dot(instance.edge_costs(x), x))


def type_aggregate_cost(instance: GameInstance, flow: FlowAssignment, type_id: str) -> float:
    """True cost borne by one type: sum_e C_e(x_e) * x_e^theta."""
    per_type = flow.edge_flows_matrix[instance.type_index[type_id]]
    return float(np.dot(instance.edge_costs(flow.total_edge_flows), per_type))
