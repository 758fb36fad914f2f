"""
Two-terminal undirected networks.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

import networkx as nx

from selfroute.core.constants import DEFAULT_PATH_CAP
from selfroute.core.errors import InvalidNetwork
from selfroute.core.model.instance import GameInstance
from selfroute.core.model.paths import Arc, enumerate_paths
from selfroute.core.utils import natural_key

logger = logging.getLogger(__name__)


def edges_on_st_paths(edges: Iterable[tuple], source: str, sink: str) -> set:
    """
    Ids of the edges lying on at least one simple source-sink path.

    An edge lies on such a path iff it shares a biconnected component with a
    virtual source-sink edge.
    """
    edges = list(edges)
    graph = nx.Graph()
    graph.add_edges_from((u, v) for _, u, v in edges if u != v)
    if source not in graph or sink not in graph or not nx.has_path(graph, source, sink):
        return set()
    graph.add_edge(source, sink)
    terminals = frozenset((source, sink))
    for component in nx.biconnected_component_edges(graph):
        pairs = {frozenset(pair) for pair in component}
        if terminals in pairs:
            return {edge_id for edge_id, u, v in edges if frozenset((u, v)) in pairs}
    return set()


@dataclass(frozen=True)
class TwoTerminalNetwork:
    """
    Undirected multigraph with a source and a sink.

    edges holds (edge_id, u, v) triples. The stored orientation u -> v carries
    no meaning for classification; generators use it to export directed games.
    """

    nodes: tuple
    edges: tuple
    source: str
    sink: str

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((str(i), str(u), str(v)) for i, u, v in self.edges))
        object.__setattr__(self, "nodes", tuple(str(n) for n in self.nodes))
        self._validate()

    def _validate(self) -> None:
        if self.source == self.sink:
            raise InvalidNetwork("Source and sink must differ")
        if not self.edges:
            raise InvalidNetwork("Network has no edges")
        node_set = set(self.nodes)
        if self.source not in node_set or self.sink not in node_set:
            raise InvalidNetwork("Terminals must be nodes of the network")
        ids = [edge_id for edge_id, _, _ in self.edges]
        if len(set(ids)) != len(ids):
            raise InvalidNetwork("Duplicate edge ids")
        for edge_id, u, v in self.edges:
            if u == v:
                raise InvalidNetwork(f"Edge {edge_id} is a self-loop")
            if u not in node_set or v not in node_set:
                raise InvalidNetwork(f"Edge {edge_id} references an unknown node")
        on_paths = edges_on_st_paths(self.edges, self.source, self.sink)
        if not on_paths:
            raise InvalidNetwork(f"{self.source} and {self.sink} are not connected")
        dangling = sorted(set(ids) - on_paths, key=natural_key)
        if dangling:
            raise InvalidNetwork(f"Edges {dangling} lie on no {self.source}-{self.sink} path")

    @classmethod
    def from_edges(
        cls, edges: Iterable[tuple], source: str, sink: str, prune: bool = False
    ) -> "TwoTerminalNetwork":
        """
        Build a network from (edge_id, u, v) triples; nodes are taken from the edges.

        With prune=True edges on no source-sink path are dropped instead of rejected.
        """
        edges = [(str(i), str(u), str(v)) for i, u, v in edges]
        if prune:
            keep = edges_on_st_paths(edges, source, sink)
            edges = [e for e in edges if e[0] in keep]
        nodes = sorted({n for _, u, v in edges for n in (u, v)} | {source, sink}, key=natural_key)
        return cls(tuple(nodes), tuple(edges), source, sink)

    @classmethod
    def from_instance(
        cls, instance: GameInstance, type_id: Optional[str] = None, prune: bool = False
    ) -> "TwoTerminalNetwork":
        """Undirected network underlying an instance, between one type's terminals."""
        user_type = instance.type(type_id) if type_id is not None else instance.types[0]
        return cls.from_edges(
            ((e.id, e.tail, e.head) for e in instance.edges),
            user_type.source,
            user_type.sink,
            prune=prune,
        )

    @cached_property
    def arcs(self) -> tuple:
        """Both orientations of every edge, for path enumeration."""
        arcs = []
        for edge_id, u, v in self.edges:
            arcs.append(Arc(edge_id, u, v))
            arcs.append(Arc(edge_id, v, u))
        return tuple(arcs)

    @cached_property
    def endpoints(self) -> dict:
        return {edge_id: (u, v) for edge_id, u, v in self.edges}

    @property
    def edge_ids(self) -> tuple:
        return tuple(edge_id for edge_id, _, _ in self.edges)

    def simple_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.nodes)
        graph.add_edges_from((u, v) for _, u, v in self.edges)
        return graph

    def multigraph(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.nodes)
        for edge_id, u, v in self.edges:
            graph.add_edge(u, v, key=edge_id)
        return graph

    def st_paths(self, cap: int = DEFAULT_PATH_CAP) -> tuple:
        """All simple undirected source-sink paths as edge-id tuples."""
        return enumerate_paths(self.arcs, self.source, self.sink, cap)

    def orient(self, path: tuple) -> list:
        """(edge_id, from, to) traversal of a source-sink path."""
        steps = []
        current = self.source
        for edge_id in path:
            u, v = self.endpoints[edge_id]
            nxt = v if u == current else u
            steps.append((edge_id, current, nxt))
            current = nxt
        return steps

    def subnetwork(self, edge_ids: Iterable[str], source: str, sink: str) -> "TwoTerminalNetwork":
        keep = set(edge_ids)
        return TwoTerminalNetwork.from_edges(
            [e for e in self.edges if e[0] in keep], source, sink
        )

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "sink": self.sink,
            "nodes": list(self.nodes),
            "edges": [list(e) for e in self.edges],
        }
