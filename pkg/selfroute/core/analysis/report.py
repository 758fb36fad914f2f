import logging
from dataclasses import dataclass, field
from typing import Optional

from tabulate import tabulate

from selfroute.core.analysis.checks import (
    CheckResult,
    analytic_poa_bound,
    check_cor1,
    check_lemma1,
    check_lemma3,
    check_poa_bound,
    check_thm1,
    check_thm3,
    check_thm4,
    two_commodity_types,
    uniform_factor,
)
from selfroute.core.constants import DEFAULT_RELATIVE_TOL
from selfroute.core.equilibrium.config import SolverConfig
from selfroute.core.equilibrium.objective import is_potential_compatible
from selfroute.core.equilibrium.solver import solve_equilibrium, solve_social_optimum
from selfroute.core.errors import BoundUndefined, CheckPreconditionError
from selfroute.core.model.instance import GameInstance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnalysisReport:
    """
    Costs, price of anarchy and every check that applies to one instance.

    analytic_poa_bound is None when the bound is undefined for the instance.
    """

    social_cost_equilibrium: float
    social_cost_optimum: float
    empirical_poa: float
    analytic_poa_bound: Optional[float]
    checks: tuple = ()
    compatibility: dict = field(default_factory=dict)

    @property
    def failures(self) -> list:
        return [check for check in self.checks if check.failed]

    def summary_table(self) -> str:
        rows = [
            [c.name, c.holds, c.margin, c.in_hypothesis, c.skipped, c.message] for c in self.checks
        ]
        return tabulate(
            rows,
            headers=["Check", "Holds", "Margin", "In hypothesis", "Skipped", "Note"],
            tablefmt="grid",
            numalign="right",
            stralign="left",
        )

    def to_json(self) -> dict:
        return {
            "social_cost_equilibrium": self.social_cost_equilibrium,
            "social_cost_optimum": self.social_cost_optimum,
            "empirical_poa": self.empirical_poa,
            "analytic_poa_bound": self.analytic_poa_bound,
            "compatibility": self.compatibility,
            "checks": [check.to_json() for check in self.checks],
        }


def _applicable_checks(
    instance: GameInstance, config: SolverConfig, relative_tol: float, reference
) -> list:
    checks = [check_cor1(instance, config), check_poa_bound(instance, config)]

    r = uniform_factor(instance)
    if r is not None:
        checks.append(check_thm1(instance, r, config, relative_tol))
    checks.append(check_lemma1(instance, reference, config, relative_tol))

    try:
        two_commodity_types(instance)
    except CheckPreconditionError:
        return checks
    for check in (check_thm3, check_thm4, check_lemma3):
        checks.append(check(instance, config, relative_tol))
    return checks


def analyze(
    instance: GameInstance,
    config: Optional[SolverConfig] = None,
    relative_tol: float = DEFAULT_RELATIVE_TOL,
) -> AnalysisReport:
    """
    Solve an instance for its equilibrium and optimum and run every applicable check.

    Two-commodity games additionally get the topology-dependent checks; they
    are evaluated even outside their hypotheses and labelled as such.

    Raises:
        NotPotentialCompatible: If the instance admits no potential
    """
    config = config or SolverConfig()
    compatibility = is_potential_compatible(instance)
    equilibrium = solve_equilibrium(instance, config)
    optimum = solve_social_optimum(instance, config)
    cost_eq = equilibrium.social_cost
    cost_opt = optimum.potential_value
    poa = cost_eq / cost_opt if cost_opt > 0 else 1.0

    try:
        bound = analytic_poa_bound(instance)
    except BoundUndefined as e:
        logger.info(f"No analytic bound: {e}")
        bound = None

    checks = _applicable_checks(instance, config, relative_tol, optimum.flow)
    report = AnalysisReport(
        social_cost_equilibrium=cost_eq,
        social_cost_optimum=cost_opt,
        empirical_poa=poa,
        analytic_poa_bound=bound,
        checks=tuple(checks),
        compatibility=compatibility.to_json(),
    )
    logger.info(f".\nAnalysis (PoA {poa:.6f})\n{report.summary_table()}")
    if report.failures:
        logger.warning(f"{len(report.failures)} checks failed inside their hypotheses")
    return report
