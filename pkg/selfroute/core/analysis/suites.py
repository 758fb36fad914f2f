"""
Randomised property suites over seeded instances.

Each suite turns a seed into a list of CheckResults. Seeds run on a thread
pool; an error raised for one seed is recorded against that seed and never
stops the others.
"""

import abc
import argparse
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from tabulate import tabulate

from selfroute.core.analysis.checks import (
    CheckResult,
    check_cor1,
    check_lemma1,
    check_lemma2,
    check_lemma3,
    check_lemma5,
    check_poa_bound,
    check_thm1,
    check_thm3,
    check_thm4,
)
from selfroute.core.analysis.random_instances import (
    InstanceProfile,
    generate_random_instance,
    random_feasible_flow,
)
from selfroute.core.constants import DEFAULT_RELATIVE_TOL
from selfroute.core.equilibrium.config import SolverConfig
from selfroute.core.equilibrium.oracle import brute_force_equilibrium
from selfroute.core.equilibrium.solver import solve_equilibrium
from selfroute.core.errors import SelfRouteError

logger = logging.getLogger(__name__)

MIXED_FAMILIES = ("dag", "sp", "li", "sli", "parallel")
DEFAULT_JOBS = os.cpu_count() or 1


@dataclass(frozen=True)
class SuiteConfig:
    seeds: int = 100
    base_seed: int = 0
    jobs: int = DEFAULT_JOBS
    relative_tol: float = DEFAULT_RELATIVE_TOL
    r_values: tuple = ()

    def __post_init__(self):
        if self.seeds < 1:
            raise ValueError(f"seeds must be positive, got {self.seeds}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be positive, got {self.jobs}")
        if any(r <= 0 for r in self.r_values):
            raise ValueError("Uncertainty factors must be positive")

    @classmethod
    def add_args(cls, parser: "argparse.ArgumentParser") -> None:
        parser.add_argument(
            "--seeds",
            type=int,
            default=100,
            help="Number of seeded random instances (default: 100)",
        )
        parser.add_argument(
            "--base_seed",
            type=int,
            default=0,
            help="First seed of the run (default: 0)",
        )
        parser.add_argument(
            "--jobs",
            type=int,
            default=int(os.getenv("SELFROUTE_JOBS", str(DEFAULT_JOBS))),
            help=f"Worker threads (env: SELFROUTE_JOBS, default: {DEFAULT_JOBS})",
        )
        parser.add_argument(
            "--relative_tol",
            type=float,
            default=float(os.getenv("SELFROUTE_RELATIVE_TOL", str(DEFAULT_RELATIVE_TOL))),
            help=f"Relative tolerance of cost comparisons (env: SELFROUTE_RELATIVE_TOL, default: {DEFAULT_RELATIVE_TOL})",
        )
        parser.add_argument(
            "--r",
            type=float,
            nargs="+",
            default=None,
            help="Uncertainty factors; overrides a suite's default grid",
        )

    @classmethod
    def from_args(cls, args) -> "SuiteConfig":
        return cls(
            seeds=args.seeds,
            base_seed=args.base_seed,
            jobs=args.jobs,
            relative_tol=args.relative_tol,
            r_values=tuple(args.r or ()),
        )


@dataclass(frozen=True)
class SuiteReport:
    name: str
    results: tuple
    errors: dict = field(default_factory=dict)

    @property
    def failures(self) -> list:
        return [result for _, result in self.results if result.failed]

    @property
    def passed(self) -> bool:
        return not self.failures and not self.errors

    @property
    def worst_margin(self) -> Optional[float]:
        margins = [r.margin for _, r in self.results if r.in_hypothesis and not r.skipped]
        return min(margins) if margins else None

    def summary_table(self) -> str:
        counts = {}
        for _, result in self.results:
            row = counts.setdefault(result.name, [0, 0, 0, 0, float("inf")])
            row[0] += 1
            if result.skipped:
                row[3] += 1
            elif not result.in_hypothesis:
                row[2] += 1
            else:
                row[4] = min(row[4], result.margin)
                if not result.holds:
                    row[1] += 1
        rows = [
            [name, total, failed, outside, skipped, None if worst == float("inf") else worst]
            for name, (total, failed, outside, skipped, worst) in counts.items()
        ]
        return tabulate(
            rows,
            headers=["Check", "Runs", "Failed", "Out of hypothesis", "Skipped", "Worst margin"],
            tablefmt="grid",
            numalign="right",
            stralign="left",
        )

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "runs": len(self.results),
            "failures": len(self.failures),
            "worst_margin": self.worst_margin,
            "errors": {str(seed): message for seed, message in self.errors.items()},
            "results": [{"seed": seed, **result.to_json()} for seed, result in self.results],
        }


class SuiteBase(metaclass=abc.ABCMeta):
    """
    A family of seeded checks.

    Subclasses implement run_seed; default_r_values is the grid used when the
    suite config does not override it.
    """

    name: str
    default_r_values: tuple = ()

    def __init__(self, config: SuiteConfig, solver_config: Optional[SolverConfig] = None):
        self.config = config
        self.solver_config = solver_config or SolverConfig()

    @property
    def r_values(self) -> tuple:
        return self.config.r_values or self.default_r_values

    @staticmethod
    def mixed_profile(seed: int, **overrides) -> InstanceProfile:
        """Topology family and type count rotate with the seed."""
        settings = dict(
            family=MIXED_FAMILIES[seed % len(MIXED_FAMILIES)],
            n_edges=4 + seed % 5,
            n_types=2 + seed % 3,
        )
        settings.update(overrides)
        return InstanceProfile(**settings)

    @abc.abstractmethod
    def run_seed(self, seed: int) -> list:
        """
        Run the suite's checks on one seed.

        Returns:
            list: CheckResults
        """
        pass

    def _run_one(self, seed: int) -> tuple:
        try:
            return seed, self.run_seed(seed), None
        except (SelfRouteError, ValueError) as e:
            logger.error(f"Suite {self.name}, seed {seed}: {e}")
            return seed, [], str(e)

    def run(self) -> SuiteReport:
        seeds = range(self.config.base_seed, self.config.base_seed + self.config.seeds)
        logger.info(f"Running suite {self.name} on {len(seeds)} seeds with {self.config.jobs} jobs")
        with ThreadPoolExecutor(max_workers=self.config.jobs) as executor:
            outcomes = list(executor.map(self._run_one, seeds))

        results = tuple((seed, result) for seed, checks, _ in outcomes for result in checks)
        errors = {seed: message for seed, _, message in outcomes if message is not None}
        report = SuiteReport(self.name, results, errors)
        logger.info(f".\nSuite {self.name}\n{report.summary_table()}")
        if not report.passed:
            logger.warning(
                f"Suite {self.name}: {len(report.failures)} failures, {len(errors)} errored seeds"
            )
        return report


class Thm1Suite(SuiteBase):
    name = "thm1"
    default_r_values = (1.0, 1.2, 1.5, 2.0, 0.3, 0.5, 0.8)
    degree = 1

    def run_seed(self, seed: int) -> list:
        instance = generate_random_instance(seed, self.mixed_profile(seed, degree=self.degree))
        return [
            check_thm1(instance, r, self.solver_config, self.config.relative_tol)
            for r in self.r_values
        ]


class Prop3Suite(Thm1Suite):
    name = "prop3"
    default_r_values = (1.5, 3.0, 5.0, 0.3, 0.5, 0.8)
    degree = 4


class Cor1Suite(SuiteBase):
    name = "cor1"

    def run_seed(self, seed: int) -> list:
        instance = generate_random_instance(seed, self.mixed_profile(seed))
        return [check_cor1(instance, self.solver_config)]


class Thm2Suite(SuiteBase):
    name = "thm2"

    def profile(self, seed: int) -> InstanceProfile:
        return self.mixed_profile(seed, uncertainty="heterogeneous", r_range=(0.8, 2.0))

    def run_seed(self, seed: int) -> list:
        return [check_poa_bound(generate_random_instance(seed, self.profile(seed)), self.solver_config)]


class Prop4Suite(Thm2Suite):
    name = "prop4"

    def profile(self, seed: int) -> InstanceProfile:
        return self.mixed_profile(
            seed, degree=2 + seed % 3, uncertainty="heterogeneous", r_range=(1.0, 2.0)
        )


class EdgePoASuite(Thm2Suite):
    name = "edge_poa"

    def profile(self, seed: int) -> InstanceProfile:
        return self.mixed_profile(seed, uncertainty="edge-dependent", r_range=(0.5, 3.0))


class Thm3Suite(SuiteBase):
    name = "thm3"
    family = "sp"
    r_range = (1.0, 3.0)

    def check(self, instance) -> CheckResult:
        return check_thm3(instance, self.solver_config, self.config.relative_tol)

    def run_seed(self, seed: int) -> list:
        profile = InstanceProfile(
            family=self.family,
            n_edges=4 + seed % 5,
            n_types=2,
            uncertainty="two-commodity",
            r_range=self.r_range,
        )
        return [self.check(generate_random_instance(seed, profile))]


class Thm4Suite(Thm3Suite):
    name = "thm4"
    family = "sli"
    r_range = (1.0, 2.0)

    def check(self, instance) -> CheckResult:
        return check_thm4(instance, self.solver_config, self.config.relative_tol)


class Lemma3Suite(Thm3Suite):
    name = "lemma3"
    family = "li"

    def check(self, instance) -> CheckResult:
        return check_lemma3(instance, self.solver_config, self.config.relative_tol)


class Lemma1Suite(SuiteBase):
    name = "lemma1"
    references = 5

    def run_seed(self, seed: int) -> list:
        instance = generate_random_instance(
            seed, self.mixed_profile(seed, uncertainty="heterogeneous", r_range=(0.3, 2.5))
        )
        equilibrium = solve_equilibrium(instance, self.solver_config).flow
        rng = np.random.default_rng(seed)
        return [
            check_lemma1(
                instance,
                random_feasible_flow(instance, rng),
                self.solver_config,
                self.config.relative_tol,
                equilibrium=equilibrium,
            )
            for _ in range(self.references)
        ]


class Lemma2Suite(SuiteBase):
    name = "lemma2"
    draws = 10

    def run_seed(self, seed: int) -> list:
        rng = np.random.default_rng(seed)
        results = []
        for _ in range(self.draws):
            x = rng.uniform(0.0, 2.0, size=5)
            x_prime = rng.uniform(0.0, 2.0, size=5)
            r = rng.uniform(0.9, 1.1, size=5)
            results.append(check_lemma2(x, x_prime, r, rng.uniform(0.1, 3.0), rng.uniform(0.0, 3.0)))
        return results


class Lemma5Suite(SuiteBase):
    name = "lemma5"
    draws = 10

    def run_seed(self, seed: int) -> list:
        rng = np.random.default_rng(seed)
        return [
            check_lemma5(
                rng.uniform(0.0, 3.0),
                rng.uniform(0.0, 3.0),
                int(rng.integers(1, 5)),
                rng.uniform(0.0, 5.0),
                rng.uniform(0.0, 5.0),
            )
            for _ in range(self.draws)
        ]


class OracleSuite(SuiteBase):
    """
    Solver against the brute-force oracle on instances with at most six paths,
    plus edge-cost agreement across the two initialisations.
    """

    name = "oracle"
    flow_tol = 1e-3
    cost_tol = 1e-6

    def run_seed(self, seed: int) -> list:
        profile = InstanceProfile(
            family=("parallel", "sp", "li")[seed % 3],
            n_edges=3,
            n_types=2,
            uncertainty="heterogeneous",
            r_range=(0.5, 2.0),
        )
        instance = generate_random_instance(seed, profile)
        solved = solve_equilibrium(instance, self.solver_config).flow
        oracle = brute_force_equilibrium(instance)
        flow_gap = float(np.max(np.abs(solved.total_edge_flows - oracle.total_edge_flows)))

        other = SolverConfig(
            max_iterations=self.solver_config.max_iterations,
            potential_gap_tol=self.solver_config.potential_gap_tol,
            initialization="last-path",
        )
        restarted = solve_equilibrium(instance, other).flow
        cost_gap = float(
            np.max(
                np.abs(
                    instance.edge_costs(solved.total_edge_flows)
                    - instance.edge_costs(restarted.total_edge_flows)
                )
            )
        )
        return [
            CheckResult(
                "oracle_flows",
                flow_gap <= self.flow_tol,
                self.flow_tol - flow_gap,
                details={"max_edge_flow_gap": flow_gap},
            ),
            CheckResult(
                "unique_costs",
                cost_gap <= self.cost_tol,
                self.cost_tol - cost_gap,
                details={"max_edge_cost_gap": cost_gap},
            ),
        ]


SUITES = {
    suite.name: suite
    for suite in (
        Thm1Suite,
        Thm2Suite,
        Cor1Suite,
        Prop3Suite,
        Prop4Suite,
        EdgePoASuite,
        Thm3Suite,
        Thm4Suite,
        Lemma1Suite,
        Lemma2Suite,
        Lemma3Suite,
        Lemma5Suite,
        OracleSuite,
    )
}


class Suite:
    """
    Factory for property suites, keyed by suite name.
    """

    __CLASS_MAP: dict = SUITES

    def __new__(
        cls, name: str, config: SuiteConfig, solver_config: Optional[SolverConfig] = None
    ) -> SuiteBase:
        try:
            suite_ = cls.__CLASS_MAP[name]
        except KeyError:
            raise ValueError(f"Unknown suite {name}. Available: {sorted(cls.__CLASS_MAP)}") from None
        return suite_(config, solver_config)


def run_suite(
    name: str, config: Optional[SuiteConfig] = None, solver_config: Optional[SolverConfig] = None
) -> SuiteReport:
    return Suite(name, config or SuiteConfig(), solver_config).run()
