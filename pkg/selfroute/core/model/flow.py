"""
Flow assignments over an instance's path catalogs.
"""

from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Mapping, Optional

import numpy as np

from selfroute.core.constants import FEASIBILITY_RTOL
from selfroute.core.errors import InfeasibleFlow
from selfroute.core.model.instance import GameInstance


@dataclass(frozen=True, eq=False)
class FlowAssignment:
    """
    Path flows x_p^theta for every user type.

    path_flows maps each type id to a vector aligned with the type's path
    catalog. Edge flows, per type and in total, are derived from the path flows
    and never stored separately.
    """

    instance: GameInstance
    path_flows: Mapping
    validate: bool = True

    def __post_init__(self):
        flows = {}
        for user_type in self.instance.types:
            n_paths = len(self.instance.paths(user_type.id))
            raw = self.path_flows.get(user_type.id)
            vector = np.zeros(n_paths) if raw is None else np.array(raw, dtype=float)
            if vector.shape != (n_paths,):
                raise InfeasibleFlow(
                    f"Type {user_type.id} needs {n_paths} path flows, got shape {vector.shape}"
                )
            vector.setflags(write=False)
            flows[user_type.id] = vector
        unknown = set(self.path_flows) - set(flows)
        if unknown:
            raise InfeasibleFlow(f"Path flows given for unknown types {sorted(unknown)}")
        object.__setattr__(self, "path_flows", MappingProxyType(flows))
        if self.validate:
            self._check_feasible()

    def _check_feasible(self) -> None:
        for user_type in self.instance.types:
            vector = self.path_flows[user_type.id]
            tol = FEASIBILITY_RTOL * max(user_type.demand, 1e-300)
            if np.any(vector < -tol):
                raise InfeasibleFlow(f"Type {user_type.id} has negative path flow")
            total = float(vector.sum())
            if abs(total - user_type.demand) > tol:
                raise InfeasibleFlow(
                    f"Type {user_type.id} routes {total} but its demand is {user_type.demand}"
                )

    @classmethod
    def from_path_flows(cls, instance: GameInstance, path_flows: Mapping) -> "FlowAssignment":
        return cls(instance, path_flows)

    @classmethod
    def zero(cls, instance: GameInstance) -> "FlowAssignment":
        """All-zero flow; only feasible when every demand is zero."""
        return cls(instance, {}, validate=False)

    @classmethod
    def proportional(cls, instance: GameInstance, aggregate: list) -> "FlowAssignment":
        """
        Split aggregate path flows over types that share one path catalog.

        Each type receives the aggregate scaled by its share of total demand.

        Args:
            instance: Instance whose types all have the same catalog
            aggregate: Total flow per catalog path

        Returns:
            FlowAssignment: Feasible when the aggregate sums to total demand

        Raises:
            InfeasibleFlow: If the types do not share a catalog
        """
        catalogs = {instance.paths(t.id) for t in instance.types}
        if len(catalogs) != 1:
            raise InfeasibleFlow("Types do not share one path catalog")
        aggregate = np.asarray(aggregate, dtype=float)
        total_demand = float(instance.demands.sum())
        flows = {
            t.id: aggregate * (t.demand / total_demand) if total_demand > 0 else aggregate * 0.0
            for t in instance.types
        }
        return cls(instance, flows)

    @cached_property
    def edge_flows_matrix(self) -> np.ndarray:
        """(types x edges) per-type edge flows."""
        return np.vstack(
            [
                self.path_flows[t.id] @ self.instance.incidence[t.id]
                for t in self.instance.types
            ]
        )

    @cached_property
    def total_edge_flows(self) -> np.ndarray:
        return self.edge_flows_matrix.sum(axis=0)

    def edge_flow(self, edge_id: str, type_id: Optional[str] = None) -> float:
        index = self.instance.edge_index[edge_id]
        if type_id is None:
            return float(self.total_edge_flows[index])
        return float(self.edge_flows_matrix[self.instance.type_index[type_id], index])

    def aggregate_path_flows(self) -> np.ndarray:
        """Total flow per path, for instances whose types share one catalog."""
        catalogs = {self.instance.paths(t.id) for t in self.instance.types}
        if len(catalogs) != 1:
            raise InfeasibleFlow("Types do not share one path catalog")
        return np.sum([self.path_flows[t.id] for t in self.instance.types], axis=0)

    def to_json(self) -> dict:
        return {
            "path_flows": {
                type_id: {
                    "+".join(path): float(value)
                    for path, value in zip(self.instance.paths(type_id), vector)
                }
                for type_id, vector in self.path_flows.items()
            },
            "edge_flows": dict(zip(self.instance.edge_ids, self.total_edge_flows.tolist())),
        }
