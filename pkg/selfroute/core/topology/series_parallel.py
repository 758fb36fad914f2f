"""
Two-terminal series-parallel recognition.

A network is series-parallel iff repeatedly merging parallel edges and
splicing out interior degree-2 nodes leaves a single source-sink edge. When the
reductions get stuck, the irreducible core contains an edge that two
source-sink paths traverse in opposite directions, which is an embedded
Wheatstone network; that pair of paths is returned as the certificate.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

import networkx as nx

from selfroute.core.constants import DEFAULT_PATH_CAP
from selfroute.core.errors import PathExplosion
from selfroute.core.model.paths import Arc, enumerate_paths
from selfroute.core.topology.network import TwoTerminalNetwork

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WheatstoneWitness:
    """Two source-sink paths crossing the edges in `crossing` in opposite directions."""

    crossing: tuple
    forward_path: tuple
    backward_path: tuple

    def to_json(self) -> dict:
        return {
            "crossing": list(self.crossing),
            "forward_path": list(self.forward_path),
            "backward_path": list(self.backward_path),
        }


@dataclass(frozen=True)
class SeriesParallelResult:
    is_series_parallel: bool
    witness: Optional[WheatstoneWitness] = None
    core_edges: int = 1

    def __bool__(self) -> bool:
        return self.is_series_parallel


def _oriented_route(data: dict, start: str) -> tuple:
    return data["route"] if data["start"] == start else tuple(reversed(data["route"]))


def reduce_series_parallel(network: TwoTerminalNetwork) -> nx.MultiGraph:
    """
    Apply parallel and series reductions until none applies.

    Each remaining edge stores `route`, one chain of original edge ids joining
    its endpoints, and `start`, the endpoint the route leaves from.
    """
    graph = nx.MultiGraph()
    for edge_id, u, v in network.edges:
        graph.add_edge(u, v, key=edge_id, route=(edge_id,), start=u)
    terminals = {network.source, network.sink}

    changed = True
    while changed:
        changed = False
        for u, v in list({tuple(sorted((u, v))) for u, v in graph.edges()}):
            keys = list(graph[u][v])
            if len(keys) > 1:
                for key in keys[1:]:
                    graph.remove_edge(u, v, key=key)
                changed = True

        for node in list(graph.nodes):
            if node in terminals or graph.degree(node) != 2:
                continue
            (_, x, k1, d1), (_, y, k2, d2) = graph.edges(node, keys=True, data=True)
            if x == y:
                continue
            route = _oriented_route(d1, x) + _oriented_route(d2, node)
            graph.remove_node(node)
            graph.add_edge(x, y, key=f"{k1}+{k2}", route=route, start=x)
            changed = True
    return graph


def _find_crossing(core: nx.MultiGraph, source: str, sink: str, cap: int) -> Optional[tuple]:
    arcs = []
    endpoints = {}
    for u, v, key in core.edges(keys=True):
        arcs.append(Arc(key, u, v))
        arcs.append(Arc(key, v, u))
        endpoints[key] = (u, v)

    directions = defaultdict(dict)
    for path in enumerate_paths(arcs, source, sink, cap):
        current = source
        steps = []
        for key in path:
            u, v = endpoints[key]
            nxt = v if u == current else u
            steps.append((key, current, nxt))
            current = nxt
        for key, frm, _ in steps:
            directions[key].setdefault(frm, steps)
            if len(directions[key]) == 2:
                u, v = endpoints[key]
                return key, directions[key][u], directions[key][v]
    return None


def _expand(core: nx.MultiGraph, steps: list) -> tuple:
    route = ()
    for key, frm, to in steps:
        route += _oriented_route(core.edges[frm, to, key], frm)
    return route


def is_series_parallel(
    network: TwoTerminalNetwork, cap: int = DEFAULT_PATH_CAP
) -> SeriesParallelResult:
    """
    Decide whether a network is two-terminal series-parallel.

    Args:
        network: A valid two-terminal network
        cap: Path cap for the certificate search on the irreducible core

    Returns:
        SeriesParallelResult: Verdict, with a Wheatstone certificate on failure
        (None if the core has more than cap paths)
    """
    core = reduce_series_parallel(network)
    if core.number_of_edges() == 1:
        return SeriesParallelResult(True)

    logger.debug(
        f"Series-parallel reduction stopped at {core.number_of_edges()} edges "
        f"and {core.number_of_nodes()} nodes"
    )
    try:
        found = _find_crossing(core, network.source, network.sink, cap)
    except PathExplosion:
        logger.warning("Irreducible core has too many paths to extract a Wheatstone certificate")
        found = None
    witness = None
    if found is not None:
        key, forward, backward = found
        frm, to = forward[[k for k, _, _ in forward].index(key)][1:]
        witness = WheatstoneWitness(
            crossing=_oriented_route(core.edges[frm, to, key], frm),
            forward_path=_expand(core, forward),
            backward_path=_expand(core, backward),
        )
    return SeriesParallelResult(False, witness, core.number_of_edges())


def is_series_parallel_by_paths(network: TwoTerminalNetwork, cap: int = DEFAULT_PATH_CAP) -> bool:
    """Brute-force check: no edge is traversed in both directions by source-sink paths."""
    seen = defaultdict(set)
    for path in network.st_paths(cap):
        for edge_id, frm, _ in network.orient(path):
            seen[edge_id].add(frm)
            if len(seen[edge_id]) == 2:
                return False
    return True
