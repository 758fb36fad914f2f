"""
Analytic price-of-anarchy bounds for games with uncertain users.
"""

import logging
from dataclasses import dataclass, field

from selfroute.core.errors import BoundUndefined
from selfroute.core.model.instance import GameInstance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UncertaintyProfile:
    """
    Spread of the uncertainty factors in a game.

    per_edge maps an edge id to the factors of the types routing over it, for
    the edge-dependent bound.
    """

    r_values: tuple
    per_edge: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.r_values:
            raise ValueError("An uncertainty profile needs at least one factor")
        if any(r <= 0 for r in self.r_values):
            raise ValueError("Uncertainty factors must be positive")

    @property
    def r_max(self) -> float:
        return max(self.r_values)

    @property
    def r_min(self) -> float:
        return min(self.r_values)

    @property
    def gamma(self) -> float:
        return self.r_min / self.r_max

    @classmethod
    def from_instance(cls, instance: GameInstance) -> "UncertaintyProfile":
        """Factors of the types that carry demand, or of every type when none does."""
        routing = [t for t in instance.types if t.demand > 0] or list(instance.types)
        per_edge = {}
        for user_type in routing:
            for edge_id in instance.catalog_edges[user_type.id]:
                per_edge.setdefault(edge_id, []).append(user_type.r_on(edge_id))
        per_edge = {edge_id: tuple(values) for edge_id, values in per_edge.items()}
        values = tuple(r for rs in per_edge.values() for r in rs)
        return cls(values, per_edge)


def _check_profile(r_max: float, gamma: float) -> None:
    if not r_max > 0:
        raise ValueError(f"r_max must be positive, got {r_max}")
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")


def poa_bound_linear(r_max: float, gamma: float) -> float:
    """
    Price-of-anarchy bound 4 / (4 gamma r_max - r_max^2) for affine costs.

    Raises:
        BoundUndefined: Unless r_max < 4 gamma
    """
    _check_profile(r_max, gamma)
    if r_max >= 4 * gamma:
        raise BoundUndefined(f"Linear bound needs r_max < 4 gamma, got r_max={r_max}, gamma={gamma}")
    return 4.0 / (4.0 * gamma * r_max - r_max**2)


def poa_bound_polynomial(r_max: float, gamma: float, d: int) -> float:
    """
    Price-of-anarchy bound for shifted monomials of degree d.

    (d+1)^((d+1)/d) / (gamma r_max (d+1)^((d+1)/d) - d r_max^((d+1)/d)),
    valid while r_max < (gamma / d)^d (d+1)^(d+1). Equals poa_bound_linear at d = 1.

    Raises:
        BoundUndefined: Outside the validity region
    """
    _check_profile(r_max, gamma)
    if d < 1:
        raise ValueError(f"Degree must be a positive integer, got {d}")
    limit = (gamma / d) ** d * (d + 1) ** (d + 1)
    if r_max >= limit:
        raise BoundUndefined(
            f"Degree-{d} bound needs r_max < {limit:.6g}, got r_max={r_max}, gamma={gamma}"
        )
    k = (d + 1) ** ((d + 1) / d)
    return k / (gamma * r_max * k - d * r_max ** ((d + 1) / d))


def poa_bound_edge_dependent(profile: UncertaintyProfile) -> float:
    """
    Largest linear bound over edges, each evaluated with its own r_max(e) and gamma(e).

    Raises:
        BoundUndefined: If some edge falls outside the linear bound's region
    """
    if not profile.per_edge:
        return poa_bound_linear(profile.r_max, profile.gamma)
    bound = 0.0
    for edge_id, values in profile.per_edge.items():
        r_max = max(values)
        try:
            bound = max(bound, poa_bound_linear(r_max, min(values) / r_max))
        except BoundUndefined as e:
            raise BoundUndefined(f"Edge {edge_id}: {e}") from e
    return bound
