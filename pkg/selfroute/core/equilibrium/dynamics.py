"""
Damped best-response dynamics under perceived costs.

Works on any instance, including edge-dependent ones that admit no potential,
but carries no convergence guarantee.
"""

import logging
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from selfroute.core.equilibrium.config import SolverConfig
from selfroute.core.equilibrium.objective import equilibrium_objective, is_potential_compatible
from selfroute.core.equilibrium.solver import SolveResult
from selfroute.core.equilibrium.verify import verify_equilibrium
from selfroute.core.errors import MissingUncertainty
from selfroute.core.model.flow import FlowAssignment
from selfroute.core.model.instance import GameInstance

logger = logging.getLogger(__name__)


def best_response_dynamics(
    instance: GameInstance, config: Optional[SolverConfig] = None
) -> SolveResult:
    """
    Round-robin rerouting: each type moves a damped share of the mass that
    would equalise the perceived costs of its worst used and its best path.

    Args:
        instance: Any game whose types define a factor on every catalog edge
        config: Iteration limit, damping and tolerances

    Returns:
        SolveResult: The last iterate; converged is the outcome of
        verify_equilibrium at equilibrium_check_tol, which is attached.
        potential_value is NaN when the instance admits no potential.

    Raises:
        MissingUncertainty: If a per-edge map omits an edge of its type's catalog
    """
    config = config or SolverConfig()
    a, b, d = instance.a, instance.b, instance.degree
    incidences = [instance.incidence[t] for t in instance.type_ids]
    factors = instance.uncertainty_matrix
    for i, type_id in enumerate(instance.type_ids):
        missing = incidences[i].any(axis=0) & np.isnan(factors[i])
        if missing.any():
            raise MissingUncertainty(type_id, instance.edge_ids[int(np.argmax(missing))])
    factors = np.nan_to_num(factors, nan=1.0)

    path_flows = []
    for i, user_type in enumerate(instance.types):
        h = np.zeros(incidences[i].shape[0])
        h[int(np.argmin(incidences[i] @ b))] = user_type.demand
        path_flows.append(h)
    edge_flows = np.vstack([h @ m for h, m in zip(path_flows, incidences)])

    def perceived(i: int, x: np.ndarray) -> np.ndarray:
        return incidences[i] @ (factors[i] * a * np.power(x, d) + b)

    def gap() -> float:
        x = edge_flows.sum(axis=0)
        total = 0.0
        for i, h in enumerate(path_flows):
            c = perceived(i, x)
            total += float(np.dot(h, c - c.min()))
        return total

    iterations = 0
    current_gap = gap()
    scale = max(1.0, float(np.dot(instance.edge_costs(edge_flows.sum(axis=0)), edge_flows.sum(axis=0))))
    while current_gap > config.potential_gap_tol * scale and iterations < config.max_iterations:
        for i, h in enumerate(path_flows):
            x = edge_flows.sum(axis=0)
            c = perceived(i, x)
            used = np.flatnonzero(h > 0)
            if used.size == 0:
                continue
            best = int(np.argmin(c))
            worst = int(used[np.argmax(c[used])])
            if c[worst] - c[best] <= 0:
                continue
            gain = incidences[i][best] - incidences[i][worst]
            weight = factors[i] * a

            def difference(delta: float) -> float:
                shifted = np.maximum(x + delta * gain, 0.0)
                return float(np.dot(gain, weight * np.power(shifted, d) + b))

            capacity = h[worst]
            if difference(capacity) <= 0:
                target = capacity
            else:
                target = brentq(difference, 0.0, capacity, xtol=1e-15 * max(1.0, capacity))
            step = config.damping * target
            if step >= capacity:
                step = capacity
                h[worst] = 0.0
            else:
                h[worst] -= step
            h[best] += step
            edge_flows[i] += step * gain
        iterations += 1
        current_gap = gap()

    flow = FlowAssignment(instance, dict(zip(instance.type_ids, path_flows)))
    report = verify_equilibrium(instance, flow, config.equilibrium_check_tol)
    potential = (
        equilibrium_objective(instance).flow_value(flow)
        if is_potential_compatible(instance)
        else float("nan")
    )
    if not report.passed:
        logger.warning(
            f"Best-response dynamics stopped after {iterations} rounds without an equilibrium "
            f"(worst violation {report.worst_violation:.3e})"
        )
    return SolveResult(
        flow=flow,
        potential_value=potential,
        converged=report.passed,
        iterations=iterations,
        duality_gap=current_gap,
        objective="best-response",
        verification=report,
    )
