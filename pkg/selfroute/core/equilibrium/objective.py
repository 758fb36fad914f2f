"""
Separable convex objectives over per-type edge flows.

Every objective minimised here has the form

    sum_e alpha_e * a_e * x_e^(d+1) / (d+1)  +  sum_theta sum_e beta_theta,e * b_e * x_e^theta

with gradient alpha_e * a_e * x_e^d + beta_theta,e * b_e for type theta on edge e.

- Equilibrium potential, scalar factors: alpha = 1, beta_theta = 1 / r_theta.
  The gradient is the perceived cost divided by r_theta, so a type's
  cheapest perceived paths are exactly its cheapest gradient paths.
- Equilibrium potential, edge-dependent factors shared by all types on an
  edge: alpha_e = r(e), beta = 1 (Beckmann integral of the perceived costs).
- Social cost: alpha = d + 1, beta = 1, whose value is sum_e C_e(x_e) x_e.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from selfroute.core.errors import NotPotentialCompatible
from selfroute.core.model.flow import FlowAssignment
from selfroute.core.model.instance import GameInstance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CompatibilityResult:
    compatible: bool
    mode: str  # "scalar", "edge-dependent" or "incompatible"
    diagnosis: str
    edge_id: Optional[str] = None

    def __bool__(self) -> bool:
        return self.compatible

    def to_json(self) -> dict:
        return {
            "compatible": self.compatible,
            "mode": self.mode,
            "diagnosis": self.diagnosis,
            "edge": self.edge_id,
        }


@dataclass(frozen=True, eq=False)
class SeparableObjective:
    instance: GameInstance
    alpha: np.ndarray
    beta: np.ndarray
    name: str

    def value(self, edge_flows_matrix: np.ndarray) -> float:
        d = self.instance.degree
        x = edge_flows_matrix.sum(axis=0)
        congestion = np.dot(self.alpha * self.instance.a, np.power(x, d + 1)) / (d + 1)
        constant = np.sum(self.beta * self.instance.b * edge_flows_matrix)
        return float(congestion + constant)

    def batch_values(self, edge_flows: np.ndarray) -> np.ndarray:
        """Values for a stack of (types x edges) matrices, shape (n, types, edges)."""
        d = self.instance.degree
        x = edge_flows.sum(axis=1)
        congestion = np.power(x, d + 1) @ (self.alpha * self.instance.a) / (d + 1)
        constant = np.einsum("nte,te->n", edge_flows, self.beta * self.instance.b)
        return congestion + constant

    def flow_value(self, flow: FlowAssignment) -> float:
        return self.value(flow.edge_flows_matrix)

    def edge_gradients(self, total_edge_flows: np.ndarray) -> np.ndarray:
        """(types x edges) partial derivatives at the given total edge flows."""
        congestion = self.alpha * self.instance.a * np.power(total_edge_flows, self.instance.degree)
        return congestion[np.newaxis, :] + self.beta * self.instance.b


def is_potential_compatible(instance: GameInstance) -> CompatibilityResult:
    """
    Decide whether the equilibria of an instance minimise a potential.

    Scalar factors always qualify. Otherwise every type routing over an edge
    must perceive that edge with one common factor.

    Returns:
        CompatibilityResult: Truthy when compatible; diagnosis names the first
        offending edge otherwise
    """
    scalars = [t.scalar_on(instance.catalog_edges[t.id]) for t in instance.types]
    if all(s is not None for s in scalars):
        return CompatibilityResult(True, "scalar", "every type perceives one factor on all its edges")

    for edge_id in instance.edge_ids:
        factors = {}
        for user_type in instance.types:
            if edge_id not in instance.catalog_edges[user_type.id]:
                continue
            if user_type.is_edge_dependent and edge_id not in user_type.uncertainty:
                return CompatibilityResult(
                    False,
                    "incompatible",
                    f"type {user_type.id} has no uncertainty factor on edge {edge_id}",
                    edge_id,
                )
            factors[user_type.id] = user_type.r_on(edge_id)
        if len(set(factors.values())) > 1:
            detail = ", ".join(f"{k}={v:g}" for k, v in factors.items())
            return CompatibilityResult(
                False,
                "incompatible",
                f"edge {edge_id} is perceived with different factors ({detail})",
                edge_id,
            )
    return CompatibilityResult(True, "edge-dependent", "every edge has one factor shared by its users")


def equilibrium_objective(instance: GameInstance) -> SeparableObjective:
    """
    The potential whose minimisers are the instance's equilibria.

    Raises:
        NotPotentialCompatible: If factors on some shared edge differ between types
    """
    compatibility = is_potential_compatible(instance)
    if not compatibility:
        raise NotPotentialCompatible(compatibility.diagnosis, compatibility.edge_id)

    n_types, n_edges = len(instance.types), len(instance.edges)
    if compatibility.mode == "scalar":
        alpha = np.ones(n_edges)
        beta = np.empty((n_types, n_edges))
        for i, user_type in enumerate(instance.types):
            beta[i, :] = 1.0 / user_type.scalar_on(instance.catalog_edges[user_type.id])
    else:
        alpha = np.ones(n_edges)
        for user_type in instance.types:
            for edge_id in instance.catalog_edges[user_type.id]:
                alpha[instance.edge_index[edge_id]] = user_type.r_on(edge_id)
        beta = np.ones((n_types, n_edges))
    return SeparableObjective(instance, alpha, beta, f"potential[{compatibility.mode}]")


def social_objective(instance: GameInstance) -> SeparableObjective:
    n_types, n_edges = len(instance.types), len(instance.edges)
    alpha = np.full(n_edges, float(instance.degree + 1))
    return SeparableObjective(instance, alpha, np.ones((n_types, n_edges)), "social-cost")


def potential_value(instance: GameInstance, flow: FlowAssignment) -> float:
    """
    Value of the equilibrium potential at a flow.

    For scalar factors this is sum_e a_e x_e^(d+1)/(d+1) + b_e sum_theta x_e^theta / r_theta.

    Raises:
        NotPotentialCompatible: If the instance admits no potential
    """
    return equilibrium_objective(instance).flow_value(flow)
