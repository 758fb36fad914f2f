"""
Game instances: a network with shifted monomial edge costs and a population of
user types, each routing its demand between its own source and sink while
perceiving congestion through an uncertainty factor.
"""

import dataclasses
import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from selfroute.core.constants import DEFAULT_PATH_CAP
from selfroute.core.errors import InvalidInstance, MissingUncertainty
from selfroute.core.model.cost import CostFunction
from selfroute.core.model.paths import Arc, Path, enumerate_paths
from selfroute.core.utils import natural_key

logger = logging.getLogger(__name__)

Uncertainty = Union[float, Mapping]


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    cost: CostFunction

    def __post_init__(self):
        if self.tail == self.head:
            raise InvalidInstance(f"Edge {self.id} is a self-loop on {self.tail}")

    def to_json(self) -> dict:
        return {"id": self.id, "tail": self.tail, "head": self.head, **self.cost.to_json()}


@dataclass(frozen=True)
class UserType:
    """
    A population of users sharing an origin, a destination and a belief about costs.

    uncertainty is either one factor r applied to every edge or a mapping
    edge id -> r(e). A user of this type perceives an edge's cost as
    r * a * x^d + b.
    """

    id: str
    source: str
    sink: str
    demand: float
    uncertainty: Uncertainty = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.demand) and self.demand >= 0):
            raise InvalidInstance(f"User type {self.id} has invalid demand {self.demand}")
        object.__setattr__(self, "demand", float(self.demand))

        if isinstance(self.uncertainty, Mapping):
            values = {str(k): float(v) for k, v in self.uncertainty.items()}
            if any(not (math.isfinite(v) and v > 0) for v in values.values()):
                raise InvalidInstance(f"User type {self.id} has a nonpositive uncertainty factor")
            object.__setattr__(self, "uncertainty", MappingProxyType(values))
        else:
            r = float(self.uncertainty)
            if not (math.isfinite(r) and r > 0):
                raise InvalidInstance(f"User type {self.id} has invalid uncertainty {r}")
            object.__setattr__(self, "uncertainty", r)

    @property
    def is_edge_dependent(self) -> bool:
        return isinstance(self.uncertainty, Mapping)

    def r_on(self, edge_id: str) -> float:
        if not self.is_edge_dependent:
            return self.uncertainty
        try:
            return self.uncertainty[edge_id]
        except KeyError:
            raise MissingUncertainty(self.id, edge_id) from None

    def scalar_on(self, edge_ids: Iterable[str]) -> Optional[float]:
        """
        The single factor this type applies over the given edges, if there is one.

        A per-edge map that is constant over edge_ids behaves like a scalar there.
        """
        if not self.is_edge_dependent:
            return self.uncertainty
        values = set()
        for edge_id in edge_ids:
            if edge_id not in self.uncertainty:
                return None
            values.add(self.uncertainty[edge_id])
        return values.pop() if len(values) == 1 else None

    def to_json(self) -> dict:
        data = {"id": self.id, "source": self.source, "sink": self.sink, "demand": self.demand}
        if self.is_edge_dependent:
            data["r_edges"] = {k: self.uncertainty[k] for k in sorted(self.uncertainty, key=natural_key)}
        else:
            data["r"] = self.uncertainty
        return data


@dataclass(frozen=True, eq=False)
class GameInstance:
    """
    Immutable description of a routing game.

    path_catalog maps every type id to its strategy set: simple paths from the
    type's source to its sink, each a tuple of edge ids. Undirected instances
    keep one Edge per undirected link; both orientations are available to paths
    and share the link's cost and flow.

    Use GameInstance.build to enumerate catalogs automatically.
    """

    nodes: tuple
    edges: tuple
    types: tuple
    path_catalog: Mapping
    undirected: bool = False

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "types", tuple(self.types))
        catalog = {
            type_id: tuple(tuple(path) for path in paths)
            for type_id, paths in self.path_catalog.items()
        }
        object.__setattr__(self, "path_catalog", MappingProxyType(catalog))
        self._validate()

    @classmethod
    def build(
        cls,
        nodes: Iterable[str],
        edges: Iterable[Edge],
        types: Iterable[UserType],
        undirected: bool = False,
        paths: Optional[Mapping] = None,
        path_cap: int = DEFAULT_PATH_CAP,
    ) -> "GameInstance":
        """
        Create an instance, enumerating each type's simple paths.

        Args:
            nodes: Node ids
            edges: Edges with their cost functions
            types: User types
            undirected: Whether edges may be traversed in both directions
            paths: Optional catalog override, type id -> list of edge-id paths
            path_cap: Maximum number of simple paths enumerated per type

        Returns:
            A validated GameInstance

        Raises:
            InvalidInstance: If the data violates a construction invariant
            PathExplosion: If a type has more than path_cap simple paths
            NoPath: If a type's sink is unreachable from its source
        """
        nodes = tuple(str(n) for n in nodes)
        edges = tuple(edges)
        types = tuple(types)
        arcs = _arcs_of(edges, undirected)
        node_set = set(nodes)
        paths = dict(paths or {})

        catalog = {}
        for user_type in types:
            if user_type.source not in node_set or user_type.sink not in node_set:
                raise InvalidInstance(
                    f"User type {user_type.id} routes between unknown nodes "
                    f"{user_type.source} -> {user_type.sink}"
                )
            if user_type.id in paths:
                catalog[user_type.id] = tuple(tuple(p) for p in paths[user_type.id])
            else:
                catalog[user_type.id] = enumerate_paths(
                    arcs, user_type.source, user_type.sink, path_cap
                )
        logger.debug(
            f"Built instance with {len(nodes)} nodes, {len(edges)} edges and "
            f"{sum(len(p) for p in catalog.values())} paths over {len(types)} types"
        )
        return cls(nodes, edges, types, catalog, undirected)

    def _validate(self) -> None:
        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise InvalidInstance("Duplicate node ids")
        if not self.edges:
            raise InvalidInstance("Instance has no edges")

        edge_ids = [e.id for e in self.edges]
        if len(set(edge_ids)) != len(edge_ids):
            raise InvalidInstance("Duplicate edge ids")
        for edge in self.edges:
            if edge.tail not in node_set or edge.head not in node_set:
                raise InvalidInstance(f"Edge {edge.id} references an unknown node")

        degrees = {e.cost.d for e in self.edges}
        if len(degrees) > 1:
            raise InvalidInstance(f"Mixed cost degrees {sorted(degrees)}; degree must be uniform")

        type_ids = [t.id for t in self.types]
        if not type_ids:
            raise InvalidInstance("Instance has no user types")
        if len(set(type_ids)) != len(type_ids):
            raise InvalidInstance("Duplicate user type ids")

        edge_set = set(edge_ids)
        edges_by_id = {e.id: e for e in self.edges}
        for user_type in self.types:
            if user_type.source not in node_set or user_type.sink not in node_set:
                raise InvalidInstance(f"User type {user_type.id} routes between unknown nodes")
            if user_type.source == user_type.sink:
                raise InvalidInstance(f"User type {user_type.id} has identical source and sink")
            if user_type.is_edge_dependent:
                unknown = set(user_type.uncertainty) - edge_set
                if unknown:
                    raise InvalidInstance(
                        f"User type {user_type.id} has uncertainty on unknown edges {sorted(unknown)}"
                    )
            paths = self.path_catalog.get(user_type.id)
            if not paths:
                raise InvalidInstance(f"User type {user_type.id} has an empty path catalog")
            if len(set(paths)) != len(paths):
                raise InvalidInstance(f"User type {user_type.id} has duplicate catalog paths")
            for path in paths:
                self._validate_path(user_type, path, edges_by_id)

        extra = set(self.path_catalog) - set(type_ids)
        if extra:
            raise InvalidInstance(f"Path catalog lists unknown user types {sorted(extra)}")

    def _validate_path(self, user_type: UserType, path: Path, edges_by_id: Mapping) -> None:
        current = user_type.source
        visited = {current}
        for edge_id in path:
            edge = edges_by_id.get(edge_id)
            if edge is None:
                raise InvalidInstance(f"Path {path} of type {user_type.id} uses unknown edge {edge_id}")
            if edge.tail == current:
                current = edge.head
            elif self.undirected and edge.head == current:
                current = edge.tail
            else:
                raise InvalidInstance(f"Path {path} of type {user_type.id} is not a walk")
            if current in visited:
                raise InvalidInstance(f"Path {path} of type {user_type.id} is not simple")
            visited.add(current)
        if current != user_type.sink:
            raise InvalidInstance(f"Path {path} of type {user_type.id} does not end at {user_type.sink}")

    @cached_property
    def arcs(self) -> tuple:
        return _arcs_of(self.edges, self.undirected)

    @cached_property
    def edge_ids(self) -> tuple:
        return tuple(e.id for e in self.edges)

    @cached_property
    def edge_index(self) -> dict:
        return {edge_id: i for i, edge_id in enumerate(self.edge_ids)}

    @cached_property
    def type_ids(self) -> tuple:
        return tuple(t.id for t in self.types)

    @cached_property
    def type_index(self) -> dict:
        return {type_id: i for i, type_id in enumerate(self.type_ids)}

    @cached_property
    def degree(self) -> int:
        return self.edges[0].cost.d

    @cached_property
    def a(self) -> np.ndarray:
        return np.array([e.cost.a for e in self.edges])

    @cached_property
    def b(self) -> np.ndarray:
        return np.array([e.cost.b for e in self.edges])

    @cached_property
    def demands(self) -> np.ndarray:
        return np.array([t.demand for t in self.types])

    @cached_property
    def incidence(self) -> dict:
        """Type id -> (paths x edges) 0/1 matrix of its catalog."""
        matrices = {}
        for type_id, paths in self.path_catalog.items():
            matrix = np.zeros((len(paths), len(self.edges)))
            for row, path in enumerate(paths):
                matrix[row, [self.edge_index[e] for e in path]] = 1.0
            matrices[type_id] = matrix
        return matrices

    @cached_property
    def uncertainty_matrix(self) -> np.ndarray:
        """(types x edges) perceived congestion factors, NaN where a map has no entry."""
        matrix = np.full((len(self.types), len(self.edges)), np.nan)
        for i, user_type in enumerate(self.types):
            if user_type.is_edge_dependent:
                for edge_id, r in user_type.uncertainty.items():
                    matrix[i, self.edge_index[edge_id]] = r
            else:
                matrix[i, :] = user_type.uncertainty
        return matrix

    @cached_property
    def catalog_edges(self) -> dict:
        """Type id -> set of edge ids appearing in its catalog."""
        return {
            type_id: {e for path in paths for e in path}
            for type_id, paths in self.path_catalog.items()
        }

    @property
    def total_paths(self) -> int:
        return sum(len(paths) for paths in self.path_catalog.values())

    def edge(self, edge_id: str) -> Edge:
        return self.edges[self.edge_index[edge_id]]

    def type(self, type_id: str) -> UserType:
        try:
            return self.types[self.type_index[type_id]]
        except KeyError:
            raise InvalidInstance(f"Unknown user type {type_id}") from None

    def paths(self, type_id: str) -> tuple:
        return self.path_catalog[type_id]

    def edge_costs(self, total_edge_flows: np.ndarray) -> np.ndarray:
        return self.a * np.power(total_edge_flows, self.degree) + self.b

    def with_uncertainty(self, uncertainties: Mapping) -> "GameInstance":
        """Copy with replaced uncertainty for the given type ids; catalogs are kept."""
        types = tuple(
            dataclasses.replace(t, uncertainty=uncertainties[t.id]) if t.id in uncertainties else t
            for t in self.types
        )
        return GameInstance(self.nodes, self.edges, types, self.path_catalog, self.undirected)

    def with_uniform_uncertainty(self, r: float) -> "GameInstance":
        return self.with_uncertainty({t.id: float(r) for t in self.types})

    def with_demands(self, demands: Mapping) -> "GameInstance":
        types = tuple(
            dataclasses.replace(t, demand=demands[t.id]) if t.id in demands else t
            for t in self.types
        )
        return GameInstance(self.nodes, self.edges, types, self.path_catalog, self.undirected)

    def to_json(self, include_paths: bool = False) -> dict:
        data = {
            "nodes": list(self.nodes),
            "edges": [e.to_json() for e in self.edges],
            "types": [t.to_json() for t in self.types],
            "undirected": self.undirected,
        }
        if include_paths:
            data["paths"] = {k: [list(p) for p in v] for k, v in self.path_catalog.items()}
        return data


def _arcs_of(edges: Sequence[Edge], undirected: bool) -> tuple:
    arcs = []
    for edge in edges:
        arcs.append(Arc(edge.id, edge.tail, edge.head))
        if undirected:
            arcs.append(Arc(edge.id, edge.head, edge.tail))
    return tuple(sorted(arcs, key=lambda arc: natural_key(arc.edge_id)))
