"""
Executable checks of the guarantees for games with uncertain users.

Every check returns a CheckResult with a signed margin (positive means slack in
the claimed direction) instead of a bare boolean, so tight cases can be told
apart from comfortable ones. Checks run on instances outside their hypotheses
too; such results carry in_hypothesis=False and never count as failures.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from selfroute.core.analysis.bounds import (
    UncertaintyProfile,
    poa_bound_edge_dependent,
    poa_bound_linear,
    poa_bound_polynomial,
)
from selfroute.core.constants import DEFAULT_RELATIVE_TOL
from selfroute.core.equilibrium.config import SolverConfig
from selfroute.core.equilibrium.objective import is_potential_compatible
from selfroute.core.equilibrium.solver import solve_equilibrium, solve_social_optimum
from selfroute.core.errors import BoundUndefined, CheckPreconditionError, TopologyMismatch
from selfroute.core.model.cost import CostFunction
from selfroute.core.model.evaluation import social_cost, type_aggregate_cost
from selfroute.core.model.flow import FlowAssignment
from selfroute.core.model.instance import GameInstance
from selfroute.core.topology.independence import decompose_sli, is_linearly_independent
from selfroute.core.topology.network import TwoTerminalNetwork
from selfroute.core.topology.series_parallel import is_series_parallel

logger = logging.getLogger(__name__)

ABSOLUTE_TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    holds: bool
    margin: float
    in_hypothesis: bool = True
    skipped: bool = False
    message: str = ""
    details: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        """A failure only counts inside the hypotheses of the guarantee."""
        return self.in_hypothesis and not self.skipped and not self.holds

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "holds": self.holds,
            "margin": self.margin,
            "in_hypothesis": self.in_hypothesis,
            "skipped": self.skipped,
            "message": self.message,
            "details": self.details,
        }


def _skip(name: str, message: str) -> CheckResult:
    logger.info(f"Check {name} skipped: {message}")
    return CheckResult(name, True, 0.0, in_hypothesis=False, skipped=True, message=message)


def uniform_factor(instance: GameInstance) -> Optional[float]:
    """The single factor shared by every type, if there is one."""
    factors = {t.scalar_on(instance.catalog_edges[t.id]) for t in instance.types}
    return factors.pop() if len(factors) == 1 and None not in factors else None


def two_commodity_types(instance: GameInstance) -> tuple:
    """
    The certain and the uncertain type of a two-commodity game.

    Raises:
        CheckPreconditionError: Unless there are exactly two scalar types with
        the same terminals, one of them with r = 1
    """
    if len(instance.types) != 2:
        raise CheckPreconditionError(f"Expected two user types, got {len(instance.types)}")
    first, second = instance.types
    if (first.source, first.sink) != (second.source, second.sink):
        raise CheckPreconditionError("Both user types must share source and sink")
    factors = [t.scalar_on(instance.catalog_edges[t.id]) for t in instance.types]
    if None in factors:
        raise CheckPreconditionError("Both user types need a single uncertainty factor")
    if factors[0] == 1.0:
        return first, second
    if factors[1] == 1.0:
        return second, first
    raise CheckPreconditionError("One user type must be certain (r = 1)")


def _topology_gate(name: str, holds_hypothesis: bool, reason: str, strict: bool) -> None:
    if holds_hypothesis:
        return
    if strict:
        raise TopologyMismatch(f"{name}: {reason}")
    logger.warning(f"Check {name} runs outside its hypothesis: {reason}")


def _equilibrium_cost(instance: GameInstance, config: Optional[SolverConfig]) -> tuple:
    result = solve_equilibrium(instance, config)
    return result.flow, social_cost(instance, result.flow)


def check_thm1(
    instance: GameInstance,
    r: float,
    config: Optional[SolverConfig] = None,
    relative_tol: float = DEFAULT_RELATIVE_TOL,
) -> CheckResult:
    """
    Uniform caution helps, uniform overconfidence hurts.

    Solves the instance with every type at factor r and its certain twin at
    r = 1. For r in [1, d+1] the uncertain cost must not exceed the certain one;
    for r in (0, 1] it must not fall below it. margin = C(x^1) - C(x~).
    """
    d = instance.degree
    name = "thm1" if d == 1 else "prop3"
    _, uncertain = _equilibrium_cost(instance.with_uniform_uncertainty(r), config)
    _, certain = _equilibrium_cost(instance.with_uniform_uncertainty(1.0), config)
    margin = certain - uncertain
    tol = relative_tol * abs(certain) + ABSOLUTE_TOL
    details = {"r": r, "cost_uncertain": uncertain, "cost_certain": certain}

    if 1.0 <= r <= d + 1:
        return CheckResult(name, margin >= -tol, margin, details=details)
    if r < 1.0:
        return CheckResult(name, margin <= tol, margin, details=details)
    return CheckResult(
        name,
        margin >= -tol,
        margin,
        in_hypothesis=False,
        message=f"no guarantee for uniform r > {d + 1}",
        details=details,
    )


def check_cor1(
    instance: GameInstance,
    config: Optional[SolverConfig] = None,
    relative_tol: float = 1e-4,
) -> CheckResult:
    """With every factor at d + 1 the equilibrium is a social optimum."""
    r = float(instance.degree + 1)
    _, uncertain = _equilibrium_cost(instance.with_uniform_uncertainty(r), config)
    optimum = solve_social_optimum(instance, config).potential_value
    margin = optimum - uncertain
    holds = abs(margin) <= relative_tol * abs(optimum) + ABSOLUTE_TOL
    return CheckResult(
        "cor1", holds, margin, details={"r": r, "cost_equilibrium": uncertain, "cost_optimum": optimum}
    )


def check_lemma1(
    instance: GameInstance,
    reference_flow: FlowAssignment,
    config: Optional[SolverConfig] = None,
    relative_tol: float = DEFAULT_RELATIVE_TOL,
    equilibrium: Optional[FlowAssignment] = None,
) -> CheckResult:
    """
    Cost difference between the equilibrium x~ and any feasible flow x:

        C(x~) - C(x) <= -sum_theta ((d+1)/r_theta - 1) sum_e b_e (x~_e^theta - x_e^theta)

    margin = RHS - LHS.
    A precomputed equilibrium can be passed to compare many references.
    """
    factors = [t.scalar_on(instance.catalog_edges[t.id]) for t in instance.types]
    if None in factors:
        return _skip("lemma1", "needs a single uncertainty factor per type")
    if reference_flow.instance is not instance:
        reference_flow = FlowAssignment(instance, dict(reference_flow.path_flows))

    if equilibrium is None:
        equilibrium = solve_equilibrium(instance, config).flow
    eq_cost = social_cost(instance, equilibrium)
    ref_cost = social_cost(instance, reference_flow)
    delta = equilibrium.edge_flows_matrix - reference_flow.edge_flows_matrix
    weights = (instance.degree + 1) / np.array(factors) - 1.0
    lhs = eq_cost - ref_cost
    rhs = -float(np.sum(weights * (delta @ instance.b)))
    margin = rhs - lhs
    tol = relative_tol * max(abs(eq_cost), abs(ref_cost)) + ABSOLUTE_TOL
    return CheckResult("lemma1", margin >= -tol, margin, details={"lhs": lhs, "rhs": rhs})


def check_lemma2(
    x: Sequence[float],
    x_prime: Sequence[float],
    r: Sequence[float],
    a: float,
    b: float,
) -> CheckResult:
    """
    For f(y) = a y + b, x = sum x_i and x' = sum x'_i:

        f(x) x / (f(x') x' + sum_i (x_i - x'_i) f(r_i x)) <= 4 / (4 r_min - r_max^2)

    Skipped when 4 r_min <= r_max^2 or the denominator is not positive.
    """
    x, x_prime, r = (np.asarray(v, dtype=float) for v in (x, x_prime, r))
    if np.any(x < 0) or np.any(x_prime < 0) or np.any(r <= 0) or a < 0 or b < 0:
        raise ValueError("Lemma inputs must be nonnegative with positive factors")
    r_min, r_max = float(r.min()), float(r.max())
    if 4 * r_min <= r_max**2:
        return _skip("lemma2", "bound undefined for 4 r_min <= r_max^2")

    total, total_prime = float(x.sum()), float(x_prime.sum())
    denominator = (a * total_prime + b) * total_prime + float(
        np.dot(x - x_prime, a * r * total + b)
    )
    if denominator <= 0:
        return _skip("lemma2", "denominator is not positive")
    ratio = (a * total + b) * total / denominator
    bound = 4.0 / (4.0 * r_min - r_max**2)
    margin = bound - ratio
    return CheckResult(
        "lemma2", margin >= -1e-12 * bound, margin, details={"ratio": ratio, "bound": bound}
    )


def check_lemma5(a: float, b: float, d: int, x1: float, x2: float) -> CheckResult:
    """First-order convexity of f(x) = a x^d + b: f(x2) - f(x1) <= f'(x2) (x2 - x1)."""
    cost = CostFunction(a, b, d)
    if x1 < 0 or x2 < 0:
        raise ValueError("Lemma points must be nonnegative")
    lhs = float(cost.evaluate(x2) - cost.evaluate(x1))
    rhs = float(cost.derivative(x2) * (x2 - x1))
    margin = rhs - lhs
    scale = max(1.0, abs(float(cost.evaluate(x2))), abs(float(cost.evaluate(x1))))
    return CheckResult("lemma5", margin >= -1e-12 * scale, margin)


def _two_commodity_solves(instance: GameInstance, config: Optional[SolverConfig]) -> tuple:
    uncertain = solve_equilibrium(instance, config).flow
    certain = solve_equilibrium(instance.with_uniform_uncertainty(1.0), config).flow
    return uncertain, certain


def check_thm3(
    instance: GameInstance,
    config: Optional[SolverConfig] = None,
    relative_tol: float = DEFAULT_RELATIVE_TOL,
    strict: bool = False,
) -> CheckResult:
    """
    On series-parallel networks, cautious users never raise the certain users' cost.

    margin = C^theta1(x^1) - C^theta1(x~) for the certain type theta1.

    Raises:
        CheckPreconditionError: If the instance is not a two-commodity game
        TopologyMismatch: If strict and the network is not series-parallel
    """
    certain_type, uncertain_type = two_commodity_types(instance)
    network = TwoTerminalNetwork.from_instance(instance, certain_type.id, prune=True)
    sp = bool(is_series_parallel(network))
    _topology_gate("thm3", sp, "network is not series-parallel", strict)

    uncertain, certain = _two_commodity_solves(instance, config)
    twin = certain.instance
    cost_uncertain = type_aggregate_cost(instance, uncertain, certain_type.id)
    cost_certain = type_aggregate_cost(twin, certain, certain_type.id)
    margin = cost_certain - cost_uncertain
    tol = relative_tol * abs(cost_certain) + ABSOLUTE_TOL
    return CheckResult(
        "thm3",
        margin >= -tol,
        margin,
        in_hypothesis=sp,
        message="" if sp else "network is not series-parallel",
        details={
            "r": uncertain_type.scalar_on(instance.catalog_edges[uncertain_type.id]),
            "type_cost_uncertain": cost_uncertain,
            "type_cost_certain": cost_certain,
        },
    )


def check_thm4(
    instance: GameInstance,
    config: Optional[SolverConfig] = None,
    relative_tol: float = DEFAULT_RELATIVE_TOL,
    strict: bool = False,
) -> CheckResult:
    """
    On serially linearly independent networks with r in [1, 2], a cautious
    population never raises the social cost. margin = C(x^1) - C(x~).

    Raises:
        CheckPreconditionError: If the instance is not a two-commodity game
        TopologyMismatch: If strict and the network is not SLI or r is outside [1, 2]
    """
    certain_type, uncertain_type = two_commodity_types(instance)
    r = uncertain_type.scalar_on(instance.catalog_edges[uncertain_type.id])
    network = TwoTerminalNetwork.from_instance(instance, certain_type.id, prune=True)
    sli = bool(decompose_sli(network))
    reasons = []
    if not sli:
        reasons.append("network is not serially linearly independent")
    if not 1.0 <= r <= 2.0:
        reasons.append(f"r = {r:g} is outside [1, 2]")
    in_hypothesis = not reasons
    _topology_gate("thm4", in_hypothesis, "; ".join(reasons), strict)

    uncertain, certain = _two_commodity_solves(instance, config)
    cost_uncertain = social_cost(instance, uncertain)
    cost_certain = social_cost(certain.instance, certain)
    margin = cost_certain - cost_uncertain
    tol = relative_tol * abs(cost_certain) + ABSOLUTE_TOL
    return CheckResult(
        "thm4",
        margin >= -tol,
        margin,
        in_hypothesis=in_hypothesis,
        message="; ".join(reasons),
        details={"r": r, "cost_uncertain": cost_uncertain, "cost_certain": cost_certain},
    )


def check_lemma3(
    instance: GameInstance,
    config: Optional[SolverConfig] = None,
    relative_tol: float = DEFAULT_RELATIVE_TOL,
    strict: bool = False,
) -> CheckResult:
    """
    On linearly independent networks, the certain type's flow on every path is
    at most the all-certain equilibrium flow on that path.

    margin = min over paths of x^1_p - x~_p^theta1.
    """
    certain_type, _ = two_commodity_types(instance)
    network = TwoTerminalNetwork.from_instance(instance, certain_type.id, prune=True)
    li = bool(is_linearly_independent(network))
    _topology_gate("lemma3", li, "network is not linearly independent", strict)

    uncertain, certain = _two_commodity_solves(instance, config)
    certain_share = uncertain.path_flows[certain_type.id]
    all_certain = certain.aggregate_path_flows()
    slack = all_certain - certain_share
    margin = float(slack.min())
    tol = relative_tol * float(instance.demands.sum()) + ABSOLUTE_TOL
    return CheckResult(
        "lemma3",
        margin >= -tol,
        margin,
        in_hypothesis=li,
        message="" if li else "network is not linearly independent",
        details={"worst_path": list(instance.paths(certain_type.id)[int(np.argmin(slack))])},
    )


def empirical_poa(instance: GameInstance, config: Optional[SolverConfig] = None) -> float:
    """Equilibrium social cost over optimal social cost (1 when both vanish)."""
    equilibrium = social_cost(instance, solve_equilibrium(instance, config).flow)
    optimum = solve_social_optimum(instance, config).potential_value
    if optimum <= 0:
        return 1.0
    return equilibrium / optimum


def analytic_poa_bound(instance: GameInstance) -> float:
    """
    The bound that applies to an instance: linear or polynomial for scalar
    factors, the per-edge maximum for edge-dependent ones.

    Raises:
        BoundUndefined: Outside the validity region, or for edge-dependent
        factors on nonlinear costs
    """
    compatibility = is_potential_compatible(instance)
    profile = UncertaintyProfile.from_instance(instance)
    if compatibility.mode == "scalar":
        if instance.degree == 1:
            return poa_bound_linear(profile.r_max, profile.gamma)
        return poa_bound_polynomial(profile.r_max, profile.gamma, instance.degree)
    if instance.degree != 1:
        raise BoundUndefined("Edge-dependent bound is only known for affine costs")
    return poa_bound_edge_dependent(profile)


def check_poa_bound(
    instance: GameInstance, config: Optional[SolverConfig] = None, absolute_tol: float = 1e-4
) -> CheckResult:
    """Empirical price of anarchy against the analytic bound; margin = bound - PoA."""
    compatibility = is_potential_compatible(instance)
    name = {"scalar": "thm2" if instance.degree == 1 else "prop4"}.get(compatibility.mode, "edge_poa")
    if not compatibility:
        return _skip(name, compatibility.diagnosis)
    try:
        bound = analytic_poa_bound(instance)
    except BoundUndefined as e:
        return _skip(name, str(e))
    poa = empirical_poa(instance, config)
    margin = bound - poa
    return CheckResult(name, margin >= -absolute_tol, margin, details={"poa": poa, "bound": bound})

