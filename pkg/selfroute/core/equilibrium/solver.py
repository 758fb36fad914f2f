"""
Frank-Wolfe minimisation of separable objectives over path flows.

The gradient of the objective with respect to x_p^theta is the sum of the
edge gradients along p, so the linearised subproblem for a type is a search
for its cheapest catalog path. Two directions are available:

- pairwise: per type, move mass from the most expensive used path to the
  cheapest path, with an exact line search along that move;
- classic: shift every type towards its all-or-nothing assignment at once,
  with an exact line search or the harmonic step 2 / (k + 2).

Both report the Frank-Wolfe duality gap sum_theta sum_p x_p (g_p - min g).
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from selfroute.core.equilibrium.config import SolverConfig
from selfroute.core.equilibrium.objective import (
    SeparableObjective,
    equilibrium_objective,
    social_objective,
)
from selfroute.core.equilibrium.verify import EquilibriumReport, verify_equilibrium
from selfroute.core.errors import DidNotConverge
from selfroute.core.model.evaluation import social_cost
from selfroute.core.model.flow import FlowAssignment
from selfroute.core.model.instance import GameInstance

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SolveResult:
    flow: FlowAssignment
    potential_value: float
    converged: bool
    iterations: int
    duality_gap: float
    objective: str = ""
    trace: tuple = ()
    verification: Optional[EquilibriumReport] = None

    @property
    def social_cost(self) -> float:
        return social_cost(self.flow.instance, self.flow)

    def raise_for_convergence(self) -> "SolveResult":
        if not self.converged:
            raise DidNotConverge(self.iterations, self.duality_gap)
        return self

    def to_json(self) -> dict:
        data = {
            "objective": self.objective,
            "social_cost": self.social_cost,
            "potential_value": self.potential_value,
            "converged": self.converged,
            "iterations": self.iterations,
            "duality_gap": self.duality_gap,
            **self.flow.to_json(),
        }
        if self.verification is not None:
            data["verification"] = self.verification.to_json()
        if self.trace:
            data["trace"] = list(self.trace)
        return data


class FlowSolver:
    """
    Stateful Frank-Wolfe run on one objective.

    Path flows are kept per type together with the (types x edges) edge-flow
    matrix, which every move updates incrementally.
    """

    def __init__(self, objective: SeparableObjective, config: SolverConfig):
        self.objective = objective
        self.instance = objective.instance
        self.config = config
        self.incidence = [self.instance.incidence[t] for t in self.instance.type_ids]
        self.path_flows = self._initial_flows()
        self.edge_flows = np.vstack(
            [h @ m for h, m in zip(self.path_flows, self.incidence)]
        )

    def _initial_flows(self) -> list:
        gradients = self.objective.edge_gradients(np.zeros(len(self.instance.edges)))
        flows = []
        for i, user_type in enumerate(self.instance.types):
            h = np.zeros(self.incidence[i].shape[0])
            if self.config.initialization == "last-path":
                h[-1] = user_type.demand
            else:
                h[int(np.argmin(self.incidence[i] @ gradients[i]))] = user_type.demand
            flows.append(h)
        return flows

    def _gap(self) -> float:
        gradients = self.objective.edge_gradients(self.edge_flows.sum(axis=0))
        gap = 0.0
        for i, h in enumerate(self.path_flows):
            g = self.incidence[i] @ gradients[i]
            gap += float(np.dot(h, g - g.min()))
        return max(gap, 0.0)

    def solve(self) -> SolveResult:
        config = self.config
        value = self.objective.value(self.edge_flows)
        trace = [value] if config.record_trace else []
        iterations = 0
        converged = False

        while True:
            gap = self._gap()
            if gap <= config.potential_gap_tol * max(1.0, abs(value)):
                converged = True
                break
            if iterations >= config.max_iterations:
                break
            if config.direction == "pairwise":
                self._pairwise_sweep()
            else:
                self._classic_step(iterations)
            iterations += 1
            value = self.objective.value(self.edge_flows)
            if config.record_trace:
                trace.append(value)
            if iterations % 1000 == 0:
                logger.debug(f"{self.objective.name}: iteration {iterations}, gap {gap:.3e}")

        if not converged:
            logger.warning(
                f"{self.objective.name}: no convergence after {iterations} iterations "
                f"(gap {gap:.3e})"
            )
        flow = FlowAssignment(
            self.instance, {t: h for t, h in zip(self.instance.type_ids, self.path_flows)}
        )
        return SolveResult(
            flow=flow,
            potential_value=value,
            converged=converged,
            iterations=iterations,
            duality_gap=gap,
            objective=self.objective.name,
            trace=tuple(trace),
        )

    def _pairwise_sweep(self) -> None:
        objective = self.objective
        a = self.instance.a
        d = self.instance.degree
        for i, h in enumerate(self.path_flows):
            incidence = self.incidence[i]
            x = self.edge_flows.sum(axis=0)
            edge_gradient = objective.edge_gradients(x)[i]
            g = incidence @ edge_gradient
            best = int(np.argmin(g))
            used = np.flatnonzero(h > 0)
            if used.size == 0:
                continue
            worst = int(used[np.argmax(g[used])])
            if g[worst] - g[best] <= 0:
                continue

            gain = incidence[best] - incidence[worst]
            plus, minus = gain > 0, gain < 0
            capacity = h[worst]
            if d == 1:
                curvature = float(np.sum((objective.alpha * a)[plus | minus]))
                step = capacity if curvature <= 0 else min(capacity, (g[worst] - g[best]) / curvature)
            else:
                beta_b = objective.beta[i] * self.instance.b

                def slope(delta: float) -> float:
                    up = objective.alpha[plus] * a[plus] * np.power(x[plus] + delta, d) + beta_b[plus]
                    down = (
                        objective.alpha[minus] * a[minus] * np.power(np.maximum(x[minus] - delta, 0.0), d)
                        + beta_b[minus]
                    )
                    return float(up.sum() - down.sum())

                if slope(capacity) <= 0:
                    step = capacity
                else:
                    step = brentq(slope, 0.0, capacity, xtol=1e-15 * max(1.0, capacity))

            if step >= capacity:
                step = capacity
                h[worst] = 0.0
            else:
                h[worst] -= step
            h[best] += step
            self.edge_flows[i] += step * gain

    def _classic_step(self, k: int) -> None:
        objective = self.objective
        x = self.edge_flows.sum(axis=0)
        gradients = objective.edge_gradients(x)
        directions = []
        for i, h in enumerate(self.path_flows):
            target = np.zeros_like(h)
            target[int(np.argmin(self.incidence[i] @ gradients[i]))] = self.instance.types[i].demand
            directions.append(target - h)
        edge_direction = np.vstack([dh @ m for dh, m in zip(directions, self.incidence)])
        dx = edge_direction.sum(axis=0)

        if self.config.step_rule == "harmonic":
            step = 2.0 / (k + 2.0)
        else:
            a = objective.alpha * self.instance.a
            d = self.instance.degree
            constant = float(np.sum(objective.beta * self.instance.b * edge_direction))

            def slope(lam: float) -> float:
                return float(np.dot(a * np.power(np.maximum(x + lam * dx, 0.0), d), dx)) + constant

            initial = slope(0.0)
            if initial >= 0:
                return
            if d == 1:
                curvature = float(np.dot(a, dx * dx))
                step = 1.0 if curvature <= 0 else min(1.0, -initial / curvature)
            elif slope(1.0) <= 0:
                step = 1.0
            else:
                step = brentq(slope, 0.0, 1.0, xtol=1e-15)

        for h, dh in zip(self.path_flows, directions):
            h += step * dh
            np.maximum(h, 0.0, out=h)
        self.edge_flows += step * edge_direction


def _log_result(kind: str, instance: GameInstance, result: SolveResult) -> None:
    logger.info(
        f"{kind}: cost {result.social_cost:.12g}, converged={result.converged}, "
        f"iterations={result.iterations}, gap={result.duality_gap:.3e} "
        f"({len(instance.types)} types, {instance.total_paths} paths)"
    )


def solve_equilibrium(instance: GameInstance, config: Optional[SolverConfig] = None) -> SolveResult:
    """
    Compute the equilibrium by minimising the instance's potential.

    Args:
        instance: A potential-compatible game
        config: Solver settings

    Returns:
        SolveResult: Flow, potential value and convergence data, with the
        equilibrium verification attached. Non-convergence is reported through
        converged=False, see SolveResult.raise_for_convergence.

    Raises:
        NotPotentialCompatible: If the instance admits no potential
    """
    config = config or SolverConfig()
    result = FlowSolver(equilibrium_objective(instance), config).solve()
    verification = verify_equilibrium(instance, result.flow, config.equilibrium_check_tol)
    result = SolveResult(
        flow=result.flow,
        potential_value=result.potential_value,
        converged=result.converged,
        iterations=result.iterations,
        duality_gap=result.duality_gap,
        objective=result.objective,
        trace=result.trace,
        verification=verification,
    )
    _log_result("Equilibrium", instance, result)
    return result


def solve_social_optimum(
    instance: GameInstance, config: Optional[SolverConfig] = None
) -> SolveResult:
    """
    Compute the flow minimising the true social cost; uncertainty is ignored.

    potential_value of the result is the social cost itself.
    """
    config = config or SolverConfig()
    result = FlowSolver(social_objective(instance), config).solve()
    _log_result("Social optimum", instance, result)
    return result
