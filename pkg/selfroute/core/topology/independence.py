"""
Linear independence and the serial decomposition into independent blocks.

A network is linearly independent when every source-sink path has a private
edge, one no other path uses. A serially linearly independent network is a
chain of linearly independent blocks joined at cut vertices, read recursively:
any number of blocks is allowed.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import networkx as nx

from selfroute.core.constants import DEFAULT_PATH_CAP
from selfroute.core.errors import InvalidNetwork
from selfroute.core.topology.network import TwoTerminalNetwork
from selfroute.core.utils import natural_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IndependenceResult:
    is_linearly_independent: bool
    witness: Optional[tuple] = None  # a path without private edge

    def __bool__(self) -> bool:
        return self.is_linearly_independent


@dataclass(frozen=True)
class SeriesBlock:
    index: int
    source: str
    sink: str
    edge_ids: tuple
    is_linearly_independent: bool
    witness: Optional[tuple] = None

    def to_json(self) -> dict:
        data = {
            "index": self.index,
            "source": self.source,
            "sink": self.sink,
            "edges": list(self.edge_ids),
            "li": self.is_linearly_independent,
        }
        if self.witness is not None:
            data["shared_path"] = list(self.witness)
        return data


@dataclass(frozen=True)
class SLIDecomposition:
    is_sli: bool
    blocks: tuple
    cut_vertices: tuple

    @property
    def failing_block(self) -> Optional[SeriesBlock]:
        return next((b for b in self.blocks if not b.is_linearly_independent), None)

    def __bool__(self) -> bool:
        return self.is_sli


def is_linearly_independent(
    network: TwoTerminalNetwork, cap: int = DEFAULT_PATH_CAP
) -> IndependenceResult:
    """
    Check that every source-sink path owns an edge no other path uses.

    Raises:
        PathExplosion: If the network has more than cap simple paths
    """
    paths = network.st_paths(cap)
    usage = Counter(edge_id for path in paths for edge_id in path)
    for path in paths:
        if all(usage[edge_id] > 1 for edge_id in path):
            return IndependenceResult(False, path)
    return IndependenceResult(True)


def st_cut_vertices(network: TwoTerminalNetwork) -> tuple:
    """Nodes every source-sink path passes through, ordered from source to sink."""
    graph = network.simple_graph()
    candidates = set(nx.articulation_points(graph)) - {network.source, network.sink}
    cuts = []
    for node in candidates:
        view = nx.restricted_view(graph, [node], [])
        if not nx.has_path(view, network.source, network.sink):
            cuts.append(node)
    order = {n: i for i, n in enumerate(nx.shortest_path(graph, network.source, network.sink))}
    return tuple(sorted(cuts, key=order.__getitem__))


def split_in_series(network: TwoTerminalNetwork, cut_vertices: Optional[tuple] = None) -> list:
    """
    Split a network at its source-sink cut vertices.

    Returns:
        list: (source, sink, edge ids) per block, from the network's source on
    """
    if cut_vertices is None:
        cut_vertices = st_cut_vertices(network)
    terminals = (network.source,) + tuple(cut_vertices) + (network.sink,)
    position = {node: i for i, node in enumerate(terminals)}

    graph = network.simple_graph()
    interior = graph.subgraph(n for n in graph.nodes if n not in position)
    component_of = {}
    for component in nx.connected_components(interior):
        touching = {
            position[nbr] for node in component for nbr in graph[node] if nbr in position
        }
        if not touching:
            continue  # isolated nodes
        block = min(touching)
        if max(touching) != block + 1:
            raise InvalidNetwork(f"Component {sorted(component)} spans non-adjacent cut vertices")
        for node in component:
            component_of[node] = block

    edges_by_block = [[] for _ in range(len(terminals) - 1)]
    for edge_id, u, v in network.edges:
        if u in component_of:
            block = component_of[u]
        elif v in component_of:
            block = component_of[v]
        else:
            block = min(position[u], position[v])
        edges_by_block[block].append(edge_id)

    return [
        (terminals[i], terminals[i + 1], tuple(sorted(ids, key=natural_key)))
        for i, ids in enumerate(edges_by_block)
    ]


def decompose_sli(network: TwoTerminalNetwork, cap: int = DEFAULT_PATH_CAP) -> SLIDecomposition:
    """
    Split at every source-sink cut vertex and test each block for independence.

    Failure is a value: the decomposition lists every block with its verdict and
    failing_block points at the first dependent one.

    Raises:
        PathExplosion: If a block has more than cap simple paths
    """
    cut_vertices = st_cut_vertices(network)
    blocks = []
    for index, (source, sink, edge_ids) in enumerate(split_in_series(network, cut_vertices)):
        block = network.subnetwork(edge_ids, source, sink)
        verdict = is_linearly_independent(block, cap)
        blocks.append(
            SeriesBlock(index, source, sink, edge_ids, verdict.is_linearly_independent, verdict.witness)
        )
    is_sli = all(b.is_linearly_independent for b in blocks)
    logger.debug(f"Serial decomposition into {len(blocks)} blocks, sli={is_sli}")
    return SLIDecomposition(is_sli, tuple(blocks), cut_vertices)
