"""
Random network generators for the topology classes.

- series-parallel: single edge | parallel join | series join
- linearly independent: single edge | parallel join of two LI networks |
  series join of an LI network with a single edge
- serially linearly independent: LI blocks joined in series

Edges are oriented from the source side to the sink side, so the directed
paths of a generated network are exactly its undirected source-sink routes.
"""

import numpy as np

from selfroute.core.topology.network import TwoTerminalNetwork


class _Builder:
    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.edges = []
        self._nodes = 0

    def node(self) -> str:
        self._nodes += 1
        return f"v{self._nodes}"

    def edge(self, u: str, v: str) -> None:
        self.edges.append((f"e{len(self.edges) + 1}", u, v))

    def _split(self, size: int) -> int:
        return int(self.rng.integers(1, size))

    def linearly_independent(self, u: str, v: str, size: int) -> None:
        if size == 1:
            self.edge(u, v)
            return
        rule = self.rng.integers(3)
        if rule == 0:
            left = self._split(size)
            self.linearly_independent(u, v, left)
            self.linearly_independent(u, v, size - left)
        elif rule == 1:
            w = self.node()
            self.edge(u, w)
            self.linearly_independent(w, v, size - 1)
        else:
            w = self.node()
            self.linearly_independent(u, w, size - 1)
            self.edge(w, v)

    def series_parallel(self, u: str, v: str, size: int) -> None:
        if size == 1:
            self.edge(u, v)
            return
        left = self._split(size)
        if self.rng.integers(2) == 0:
            self.series_parallel(u, v, left)
            self.series_parallel(u, v, size - left)
        else:
            w = self.node()
            self.series_parallel(u, w, left)
            self.series_parallel(w, v, size - left)

    def network(self) -> TwoTerminalNetwork:
        return TwoTerminalNetwork.from_edges(self.edges, "s", "t")


def random_li_network(rng: np.random.Generator, n_edges: int) -> TwoTerminalNetwork:
    builder = _Builder(rng)
    builder.linearly_independent("s", "t", max(1, n_edges))
    return builder.network()


def random_sp_network(rng: np.random.Generator, n_edges: int) -> TwoTerminalNetwork:
    builder = _Builder(rng)
    builder.series_parallel("s", "t", max(1, n_edges))
    return builder.network()


def random_sli_network(
    rng: np.random.Generator, n_blocks: int, edges_per_block: int
) -> TwoTerminalNetwork:
    builder = _Builder(rng)
    terminals = ["s"] + [builder.node() for _ in range(n_blocks - 1)] + ["t"]
    for u, v in zip(terminals, terminals[1:]):
        builder.linearly_independent(u, v, int(rng.integers(1, edges_per_block + 1)))
    return builder.network()


def random_network(rng: np.random.Generator, n_nodes: int, n_edges: int) -> TwoTerminalNetwork:
    """
    Arbitrary network: random edges between n_nodes nodes, pruned to the
    edges lying on source-sink paths. A spanning chain keeps s and t connected.
    """
    nodes = ["s"] + [f"v{i}" for i in range(1, n_nodes - 1)] + ["t"]
    edges = [(f"e{i + 1}", u, v) for i, (u, v) in enumerate(zip(nodes, nodes[1:]))]
    while len(edges) < n_edges:
        u, v = rng.choice(len(nodes), size=2, replace=False)
        edges.append((f"e{len(edges) + 1}", nodes[u], nodes[v]))
    return TwoTerminalNetwork.from_edges(edges, "s", "t", prune=True)


def parallel_network(n_links: int) -> TwoTerminalNetwork:
    return TwoTerminalNetwork.from_edges(
        [(f"e{i + 1}", "s", "t") for i in range(n_links)], "s", "t"
    )


def wheatstone_network() -> TwoTerminalNetwork:
    """Four nodes, five edges; e5 bridges the two parallel routes."""
    return TwoTerminalNetwork.from_edges(
        [("e1", "s", "v"), ("e2", "v", "t"), ("e3", "s", "w"), ("e4", "w", "t"), ("e5", "v", "w")],
        "s",
        "t",
    )
