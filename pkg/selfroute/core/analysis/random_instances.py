"""
Seeded random game instances for the property suites.
"""

import logging
from dataclasses import dataclass

import numpy as np

from selfroute.core.constants import RANDOM_R_MARGIN
from selfroute.core.model.cost import CostFunction
from selfroute.core.model.flow import FlowAssignment
from selfroute.core.model.instance import Edge, GameInstance, UserType
from selfroute.core.topology.grammar import (
    parallel_network,
    random_li_network,
    random_network,
    random_sli_network,
    random_sp_network,
)
from selfroute.core.topology.network import TwoTerminalNetwork
from selfroute.core.utils import natural_key

logger = logging.getLogger(__name__)

FAMILIES = ("dag", "sp", "li", "sli", "parallel")
UNCERTAINTY_MODES = ("uniform", "heterogeneous", "two-commodity", "edge-dependent")

MAX_R_DRAWS = 1000


@dataclass(frozen=True)
class InstanceProfile:
    """
    Shape of a random instance.

    family picks the topology generator, uncertainty how factors are drawn:

    - uniform: one factor for every type
    - heterogeneous: one factor per type, with r_max^2 <= 3.5 r_min so the
      linear bound stays finite
    - two-commodity: exactly two types, the first certain
    - edge-dependent: one factor per edge shared by every type
    """

    family: str = "sp"
    n_edges: int = 6
    n_types: int = 2
    degree: int = 1
    a_range: tuple = (0.5, 3.0)
    b_range: tuple = (0.0, 3.0)
    demand_range: tuple = (0.2, 1.5)
    r_range: tuple = (0.5, 2.0)
    uncertainty: str = "uniform"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"Unknown family {self.family}. Available: {FAMILIES}")
        if self.uncertainty not in UNCERTAINTY_MODES:
            raise ValueError(f"Unknown uncertainty mode {self.uncertainty}. Available: {UNCERTAINTY_MODES}")
        if self.n_edges < 1 or self.n_types < 1 or self.degree < 1:
            raise ValueError("n_edges, n_types and degree must be positive")
        if self.uncertainty == "two-commodity" and self.n_types != 2:
            raise ValueError("Two-commodity instances have exactly two types")
        for name in ("a_range", "b_range", "demand_range", "r_range"):
            low, high = getattr(self, name)
            if low > high or low < 0:
                raise ValueError(f"{name} must be a nonnegative interval, got {(low, high)}")
        if self.a_range[0] <= 0:
            raise ValueError("Congestion coefficients must be positive")
        if self.r_range[0] <= 0:
            raise ValueError("Uncertainty factors must be positive")


def _rank(node: str) -> tuple:
    if node == "s":
        return (0,)
    if node == "t":
        return (2,)
    return (1,) + natural_key(node)


def _network(rng: np.random.Generator, profile: InstanceProfile) -> TwoTerminalNetwork:
    n = profile.n_edges
    if profile.family == "sp":
        return random_sp_network(rng, n)
    if profile.family == "li":
        return random_li_network(rng, n)
    if profile.family == "sli":
        return random_sli_network(rng, max(2, n // 3), 3)
    if profile.family == "parallel":
        return parallel_network(n)
    network = random_network(rng, max(3, n // 2 + 1), n)
    # orient every edge along the node order so the instance is acyclic
    edges = [(i, u, v) if _rank(u) < _rank(v) else (i, v, u) for i, u, v in network.edges]
    return TwoTerminalNetwork.from_edges(edges, "s", "t")


def _factors(rng: np.random.Generator, profile: InstanceProfile, n_types: int) -> list:
    low, high = profile.r_range
    if profile.uncertainty == "uniform":
        return [float(rng.uniform(low, high))] * n_types
    if profile.uncertainty == "two-commodity":
        return [1.0, float(rng.uniform(low, high))]
    for _ in range(MAX_R_DRAWS):
        values = rng.uniform(low, high, size=n_types)
        if values.max() ** 2 <= RANDOM_R_MARGIN * values.min():
            return [float(v) for v in values]
    logger.warning(f"No factors in {profile.r_range} keep the bound finite; using a uniform draw")
    return [float(rng.uniform(low, high))] * n_types


def generate_random_instance(seed: int, profile: InstanceProfile = InstanceProfile()) -> GameInstance:
    """
    Draw a game instance; the same seed and profile always give the same instance.

    Every type routes from "s" to "t" over the generated network's orientation.

    Args:
        seed: Seed for numpy's default generator
        profile: Topology family, coefficient ranges and uncertainty mode

    Returns:
        GameInstance: A validated instance
    """
    rng = np.random.default_rng(seed)
    network = _network(rng, profile)
    edges = [
        Edge(
            edge_id,
            u,
            v,
            CostFunction(
                float(rng.uniform(*profile.a_range)),
                float(rng.uniform(*profile.b_range)),
                profile.degree,
            ),
        )
        for edge_id, u, v in network.edges
    ]

    n_types = profile.n_types
    demands = rng.uniform(*profile.demand_range, size=n_types)
    if profile.uncertainty == "edge-dependent":
        per_edge = {e.id: float(rng.uniform(*profile.r_range)) for e in edges}
        uncertainties = [per_edge] * n_types
    else:
        uncertainties = _factors(rng, profile, n_types)

    types = [
        UserType(f"theta{k + 1}", "s", "t", float(demands[k]), uncertainties[k])
        for k in range(n_types)
    ]
    instance = GameInstance.build(network.nodes, edges, types)
    logger.debug(
        f"Random {profile.family} instance (seed {seed}): {len(edges)} edges, "
        f"{instance.total_paths} paths, mode {profile.uncertainty}"
    )
    return instance


def random_feasible_flow(instance: GameInstance, rng: np.random.Generator) -> FlowAssignment:
    """Feasible flow with each type's demand split by a flat Dirichlet draw."""
    return FlowAssignment(
        instance,
        {
            t.id: t.demand * rng.dirichlet(np.ones(len(instance.paths(t.id))))
            for t in instance.types
        },
    )
