"""
Parking as a two-commodity routing game.

Parking users drive to a zone and either park on-street there or use a garage;
through traffic crosses the same roads. The parking decision is made part of the
network: every zone exit gets a fake edge into a new parking sink carrying the
accumulated on-street parking cost, and the garage gets a fake edge carrying
the garage cost. Road edges keep only their travel latency, shared by both
populations. Parking users perceive congestion with factor r on the fake edges
only; everything else they, and through traffic, see as it is.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from selfroute.core.constants import GARAGE_EDGE, ONSTREET_EDGE, PARKING_SINK
from selfroute.core.errors import InvalidInstance, SpecInvalid
from selfroute.core.model.cost import CostFunction
from selfroute.core.model.flow import FlowAssignment
from selfroute.core.model.instance import Edge, GameInstance, UserType

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParkingSpec:
    """
    A road network with an on-street parking zone and a garage.

    Attributes:
        nodes: Road network nodes
        edges: Road edges with latency-only costs
        onstreet: Edge id -> on-street parking cost component of that edge
        exits: Zone nodes from which on-street parkers leave for the parking sink
        garage: Node where the garage is entered
        garage_cost: Garage cost a_pg x + b_pg
        parking_sources: Node -> parking demand
        through: (source, sink, demand) triples of through traffic
        r: Uncertainty of parking users about parking congestion
        price_tradeoff: Multiplier applied to the flow-independent parking prices
        parking_sink: Id of the node added as destination of parking users
    """

    nodes: tuple
    edges: tuple
    onstreet: Mapping
    exits: tuple
    garage: str
    garage_cost: CostFunction
    parking_sources: Mapping
    through: tuple = ()
    r: float = 1.0
    price_tradeoff: float = 1.0
    parking_sink: str = PARKING_SINK

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "exits", tuple(self.exits))
        object.__setattr__(self, "through", tuple(tuple(t) for t in self.through))
        self._validate()

    def _validate(self) -> None:
        node_set = set(self.nodes)
        edge_ids = {e.id for e in self.edges}
        if not self.onstreet:
            raise SpecInvalid("onstreet", "the parking zone needs at least one on-street edge")
        unknown = set(self.onstreet) - edge_ids
        if unknown:
            raise SpecInvalid("onstreet", f"unknown edges {sorted(unknown)}")
        degrees = {e.cost.d for e in self.edges} | {c.d for c in self.onstreet.values()}
        degrees.add(self.garage_cost.d)
        if len(degrees) > 1:
            raise SpecInvalid("onstreet", f"mixed cost degrees {sorted(degrees)}")
        if not self.exits:
            raise SpecInvalid("exits", "at least one zone exit is required")
        if set(self.exits) - node_set:
            raise SpecInvalid("exits", f"unknown nodes {sorted(set(self.exits) - node_set)}")
        if self.garage not in node_set:
            raise SpecInvalid("garage", f"unknown node {self.garage}")
        if not self.parking_sources:
            raise SpecInvalid("parking_sources", "at least one parking origin is required")
        for node, demand in self.parking_sources.items():
            if node not in node_set:
                raise SpecInvalid("parking_sources", f"unknown node {node}")
            if not demand >= 0:
                raise SpecInvalid("parking_sources", f"negative demand {demand} at {node}")
        for source, sink, demand in self.through:
            if source not in node_set or sink not in node_set:
                raise SpecInvalid("through", f"unknown terminals {source} -> {sink}")
            if not demand >= 0:
                raise SpecInvalid("through", f"negative demand {demand}")
        if not self.r > 0:
            raise SpecInvalid("r", f"must be positive, got {self.r}")
        if not self.price_tradeoff >= 0:
            raise SpecInvalid("price_tradeoff", f"must be nonnegative, got {self.price_tradeoff}")
        if self.parking_sink in node_set:
            raise SpecInvalid("parking_sink", f"{self.parking_sink} is already a road node")

    @property
    def degree(self) -> int:
        return self.garage_cost.d

    @property
    def onstreet_a(self) -> float:
        return sum(c.a for c in self.onstreet.values())

    @property
    def onstreet_b(self) -> float:
        return sum(c.b for c in self.onstreet.values())

    @property
    def onstreet_edge_ids(self) -> tuple:
        if len(self.exits) == 1:
            return (ONSTREET_EDGE,)
        return tuple(f"{ONSTREET_EDGE}_{exit_node}" for exit_node in self.exits)

    @property
    def fake_edge_ids(self) -> tuple:
        return self.onstreet_edge_ids + (GARAGE_EDGE,)


def apply_parking_transform(spec: ParkingSpec) -> GameInstance:
    """
    Turn a parking spec into a two-commodity game.

    Adds the parking sink, one fake on-street edge per exit with cost
    sum(a_os) x + tradeoff * sum(b_os), and the garage edge with cost
    a_pg x + tradeoff * b_pg. Parking types perceive factor r on the fake
    edges; through types are certain.

    Raises:
        SpecInvalid: If the resulting instance violates a construction invariant
    """
    d = spec.degree
    onstreet_cost = CostFunction(spec.onstreet_a, spec.price_tradeoff * spec.onstreet_b, d)
    garage_cost = CostFunction(
        spec.garage_cost.a, spec.price_tradeoff * spec.garage_cost.b, d
    )
    fake_edges = [
        Edge(edge_id, exit_node, spec.parking_sink, onstreet_cost)
        for edge_id, exit_node in zip(spec.onstreet_edge_ids, spec.exits)
    ]
    fake_edges.append(Edge(GARAGE_EDGE, spec.garage, spec.parking_sink, garage_cost))
    edges = list(spec.edges) + fake_edges

    perceived = {e.id: 1.0 for e in spec.edges}
    perceived.update({edge_id: float(spec.r) for edge_id in spec.fake_edge_ids})

    types = []
    single_source = len(spec.parking_sources) == 1
    for node, demand in spec.parking_sources.items():
        type_id = "parking" if single_source else f"parking_{node}"
        types.append(UserType(type_id, node, spec.parking_sink, demand, perceived))
    for k, (source, sink, demand) in enumerate(spec.through):
        type_id = "through" if len(spec.through) == 1 else f"through_{source}_{k}"
        types.append(UserType(type_id, source, sink, demand, 1.0))

    try:
        instance = GameInstance.build(spec.nodes + (spec.parking_sink,), edges, types)
    except InvalidInstance as e:
        raise SpecInvalid("edges", str(e)) from e
    logger.debug(
        f"Parking transform: {len(types)} types, {len(edges)} edges, on-street a={spec.onstreet_a:g}"
    )
    return instance


def parking_masses(spec: ParkingSpec, flow: FlowAssignment) -> tuple:
    """(on-street mass, garage mass) of a flow on the transformed instance."""
    onstreet = sum(flow.edge_flow(edge_id) for edge_id in spec.onstreet_edge_ids)
    return onstreet, flow.edge_flow(GARAGE_EDGE)


def decomposed_cost(spec: ParkingSpec, flow: FlowAssignment) -> dict:
    """
    Social cost split into travel latency, on-street parking and garage parking.

    Parking costs are recomputed from the per-edge on-street components of the
    spec, each evaluated at the mass parking through its exit, so the three
    parts add up to the social cost of the transformed instance.
    """
    latency = 0.0
    for edge in spec.edges:
        x = flow.edge_flow(edge.id)
        latency += float(edge.cost.evaluate(x)) * x

    onstreet = 0.0
    for edge_id in spec.onstreet_edge_ids:
        y = flow.edge_flow(edge_id)
        per_unit = sum(
            c.a * y**c.d + spec.price_tradeoff * c.b for c in spec.onstreet.values()
        )
        onstreet += per_unit * y

    g = flow.edge_flow(GARAGE_EDGE)
    garage = (spec.garage_cost.a * g**spec.degree + spec.price_tradeoff * spec.garage_cost.b) * g
    return {"latency": latency, "onstreet": onstreet, "garage": garage}


def default_parking_spec(r: float = 1.0, price_tradeoff: float = 1.0) -> ParkingSpec:
    """
    Pinned parking scenario.

    Roads have constant latency. From s parkers reach the zone at z, cross it on
    one of two on-street routes (z-n-o or z-m-o) and leave at o; the garage is
    reached over s-g. Through traffic goes from s to t and takes the zone route
    (latency 2.8). On-street parking costs 2y + 1 at on-street mass y, the
    garage 3.1, so the on-street share is 0.8 / r in equilibrium (capped at 1)
    and 0.4 at the optimum.
    """
    roads = [
        ("s_zone", "s", "z", 1.0),
        ("os_n1", "z", "n", 0.5),
        ("os_n2", "n", "o", 0.5),
        ("os_s1", "z", "m", 0.5),
        ("os_s2", "m", "o", 0.5),
        ("zone_t", "o", "t", 0.8),
        ("s_g", "s", "g", 1.5),
        ("g_t", "g", "t", 1.5),
    ]
    edges = tuple(Edge(i, u, v, CostFunction(0.0, b)) for i, u, v, b in roads)
    onstreet = {e: CostFunction(0.5, 0.25) for e in ("os_n1", "os_n2", "os_s1", "os_s2")}
    return ParkingSpec(
        nodes=("s", "z", "n", "m", "o", "g", "t"),
        edges=edges,
        onstreet=onstreet,
        exits=("o",),
        garage="g",
        garage_cost=CostFunction(0.0, 3.1),
        parking_sources={"s": 1.0},
        through=(("s", "t", 1.0),),
        r=r,
        price_tradeoff=price_tradeoff,
    )


@dataclass(frozen=True)
class GridCitySpec:
    """
    Downtown grid with uniform, lightly congested road costs.

    Roads run right and down. The parking zone is the bottom-right 2x2 block
    with its exit at the bottom-right corner, the garage sits at the top-right
    corner and parkers start at the top-left corner. Every other node sends
    through traffic to the bottom-right corner. On-street components are drawn
    from onstreet_a_range and onstreet_b_range with the given seed.
    With the defaults on a 4x4 grid, part of the parkers park on-street at
    r = 1 and the on-street share falls as r grows.
    """

    road_cost: CostFunction = field(default_factory=lambda: CostFunction(0.1, 1.0))
    onstreet_a_range: tuple = (1.5, 2.0)
    onstreet_b_range: tuple = (0.1, 0.2)
    garage_cost: CostFunction = field(default_factory=lambda: CostFunction(0.0, 7.0))
    parking_demand: float = 1.0
    through_demand: float = 0.1
    r: float = 1.0
    price_tradeoff: float = 1.0
    seed: int = 0


def _grid_node(i: int, j: int) -> str:
    return f"n{i}_{j}"


def build_grid_spec(rows: int, cols: int, spec: Optional[GridCitySpec] = None) -> ParkingSpec:
    if rows < 2 or cols < 2:
        raise SpecInvalid("rows/cols", f"grid must be at least 2x2, got {rows}x{cols}")
    spec = spec or GridCitySpec()
    rng = np.random.default_rng(spec.seed)
    d = spec.road_cost.d

    nodes = tuple(_grid_node(i, j) for i in range(rows) for j in range(cols))
    edges = []
    for i in range(rows):
        for j in range(cols):
            if j + 1 < cols:
                edges.append(Edge(f"r{i}_{j}", _grid_node(i, j), _grid_node(i, j + 1), spec.road_cost))
            if i + 1 < rows:
                edges.append(Edge(f"d{i}_{j}", _grid_node(i, j), _grid_node(i + 1, j), spec.road_cost))

    zone = {_grid_node(i, j) for i in (rows - 2, rows - 1) for j in (cols - 2, cols - 1)}
    onstreet = {
        e.id: CostFunction(
            float(rng.uniform(*spec.onstreet_a_range)), float(rng.uniform(*spec.onstreet_b_range)), d
        )
        for e in edges
        if e.tail in zone and e.head in zone
    }
    exit_node = _grid_node(rows - 1, cols - 1)
    through = tuple(
        (node, exit_node, spec.through_demand) for node in nodes if node != exit_node
    )
    return ParkingSpec(
        nodes=nodes,
        edges=tuple(edges),
        onstreet=onstreet,
        exits=(exit_node,),
        garage=_grid_node(0, cols - 1),
        garage_cost=spec.garage_cost,
        parking_sources={_grid_node(0, 0): spec.parking_demand},
        through=through,
        r=spec.r,
        price_tradeoff=spec.price_tradeoff,
    )


def build_grid_city(rows: int, cols: int, spec: Optional[GridCitySpec] = None) -> GameInstance:
    """
    Grid city with the parking transform applied.

    Raises:
        SpecInvalid: If the grid is smaller than 2x2
    """
    return apply_parking_transform(build_grid_spec(rows, cols, spec))
