"""
Simple path enumeration over arc lists.

Paths are tuples of edge ids. Enumeration order is deterministic: a
depth-first search that tries outgoing arcs in natural edge-id order, which
yields paths sorted lexicographically by their edge-id sequences.
"""

import logging
import threading
from collections import defaultdict
from typing import NamedTuple, Sequence

import cachetools
from cachetools import LRUCache

from selfroute.core.constants import DEFAULT_PATH_CAP
from selfroute.core.errors import NoPath, PathExplosion
from selfroute.core.utils import natural_key

logger = logging.getLogger(__name__)

Path = tuple

_path_cache = LRUCache(maxsize=512)


class Arc(NamedTuple):
    edge_id: str
    tail: str
    head: str


@cachetools.cached(cache=_path_cache, lock=threading.Lock())
def _enumerate(arcs: tuple, source: str, sink: str, cap: int) -> tuple:
    outgoing = defaultdict(list)
    for arc in sorted(arcs, key=lambda a: natural_key(a.edge_id)):
        outgoing[arc.tail].append(arc)

    paths = []
    edge_stack = []
    visited = {source}

    def _extend(node: str) -> None:
        if node == sink:
            paths.append(tuple(edge_stack))
            if len(paths) > cap:
                raise PathExplosion(cap, source, sink)
            return
        for arc in outgoing[node]:
            if arc.head in visited:
                continue
            visited.add(arc.head)
            edge_stack.append(arc.edge_id)
            _extend(arc.head)
            edge_stack.pop()
            visited.discard(arc.head)

    _extend(source)
    return tuple(paths)


def enumerate_paths(
    arcs: Sequence[Arc], source: str, sink: str, cap: int = DEFAULT_PATH_CAP
) -> tuple:
    """
    Enumerate all simple source -> sink paths.

    Args:
        arcs: Directed arcs (edge_id, tail, head); an undirected link contributes
            one arc per orientation under the same edge id
        source: Start node
        sink: End node
        cap: Maximum number of paths to enumerate

    Returns:
        tuple: Paths as tuples of edge ids, in lexicographic edge-id order

    Raises:
        PathExplosion: If more than cap simple paths exist
        NoPath: If no path exists
    """
    if cap < 1:
        raise ValueError(f"Path cap must be positive, got {cap}")
    arcs = tuple(Arc(*arc) for arc in arcs)
    paths = _enumerate(arcs, source, sink, cap)
    if not paths:
        raise NoPath(source, sink)
    return paths
