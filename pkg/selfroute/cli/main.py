#! /usr/bin/env python3

"""
selfroute command line.

    selfroute solve --scenario pigou --epsilon 0.1 --r 3
    selfroute optimum --instance game.json
    selfroute classify --scenario fig3
    selfroute verify thm1 --seeds 100 --r 1.5
    selfroute verify thm3 --scenario pigou --epsilon 0.2 --r 3
    selfroute sweep --scenario parking --r_grid 0.5 1 1.5 2
    selfroute scenario fig3 --epsilon 0.05

Exit status is 0 on success, 1 when a check fails inside its hypotheses and 2
on bad input or usage.
"""

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from selfroute.cli import BaseCommand
from selfroute.core.analysis.report import analyze
from selfroute.core.analysis.suites import DEFAULT_JOBS, SUITES, SuiteConfig, run_suite
from selfroute.core.constants import DEFAULT_PATH_CAP
from selfroute.core.equilibrium.config import SolverConfig
from selfroute.core.equilibrium.dynamics import best_response_dynamics
from selfroute.core.equilibrium.solver import solve_equilibrium, solve_social_optimum
from selfroute.core.errors import SelfRouteError
from selfroute.core.model.instance import GameInstance
from selfroute.core.model.io import dump_instance, load_instance
from selfroute.core.scenarios.sweep import SCENARIOS, get_scenario, sweep_scenario
from selfroute.core.topology.network import TwoTerminalNetwork
from selfroute.core.topology.report import classify
from selfroute.core.utils import dump_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

CHECK_NAMES = ("all", "cor1", "thm1", "prop3", "thm2", "prop4", "edge_poa", "lemma1", "thm3", "thm4", "lemma3")


class SelfRouteCommand(BaseCommand):
    """
    Command-line front end: solve, classify, verify and sweep games.
    """

    def add_args(self, parser: argparse.ArgumentParser) -> None:
        common = self.common_args()
        subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

        solve = subparsers.add_parser("solve", parents=[common], help="Equilibrium of a game")
        self.add_source_args(solve)
        SolverConfig.add_args(solve)
        solve.add_argument(
            "--method",
            type=str,
            choices=("frank-wolfe", "best-response"),
            default="frank-wolfe",
            help="Potential minimisation or damped best-response dynamics (default: frank-wolfe)",
        )

        optimum = subparsers.add_parser("optimum", parents=[common], help="Social optimum of a game")
        self.add_source_args(optimum)
        SolverConfig.add_args(optimum)

        topology = subparsers.add_parser(
            "classify", parents=[common], help="Series-parallel / independence verdicts"
        )
        self.add_source_args(topology)
        topology.add_argument(
            "--type", dest="type_id", default=None, help="User type whose terminals are used"
        )

        verify = subparsers.add_parser(
            "verify",
            parents=[common],
            help="Run a property suite, or the checks of one game with --instance/--scenario",
        )
        verify.add_argument(
            "name",
            choices=sorted(set(SUITES) | set(CHECK_NAMES)),
            help="Suite name, or check name when a game is given",
        )
        self.add_source_args(verify, required=False, with_r=False)
        SuiteConfig.add_args(verify)
        SolverConfig.add_args(verify)

        sweep = subparsers.add_parser("sweep", parents=[common], help="Sweep the uncertainty factor")
        sweep.add_argument("--scenario", choices=sorted(SCENARIOS), required=True)
        sweep.add_argument("--epsilon", type=float, default=0.0, help="Uncertain share (default: 0)")
        sweep.add_argument(
            "--r_grid",
            type=float,
            nargs="+",
            default=[0.5, 0.75, 1.0, 1.5, 2.0, 2.5],
            help="Strictly increasing uncertainty factors",
        )
        sweep.add_argument("--format", choices=("csv", "json"), default="csv")
        sweep.add_argument(
            "--jobs",
            type=int,
            default=int(os.getenv("SELFROUTE_JOBS", str(DEFAULT_JOBS))),
            help=f"Worker threads across grid points (env: SELFROUTE_JOBS, default: {DEFAULT_JOBS})",
        )
        SolverConfig.add_args(sweep)

        export = subparsers.add_parser("scenario", parents=[common], help="Export a named game as JSON")
        export.add_argument("name", choices=sorted(SCENARIOS))
        export.add_argument("--epsilon", type=float, default=0.0)
        export.add_argument("--r", type=float, default=None)
        export.add_argument("--paths", action="store_true", help="Include the path catalogs")

    @staticmethod
    def add_source_args(
        parser: argparse.ArgumentParser, required: bool = True, with_r: bool = True
    ) -> None:
        source = parser.add_mutually_exclusive_group(required=required)
        source.add_argument("--instance", type=str, help="Instance JSON file")
        source.add_argument("--scenario", choices=sorted(SCENARIOS), help="Named scenario")
        parser.add_argument(
            "--epsilon", type=float, default=0.0, help="Uncertain share of a scenario (default: 0)"
        )
        if with_r:
            parser.add_argument(
                "--r", type=float, default=None, help="Uncertainty factor of a scenario"
            )
        parser.add_argument(
            "--path_cap",
            type=int,
            default=int(os.getenv("SELFROUTE_PATH_CAP", str(DEFAULT_PATH_CAP))),
            help=f"Simple paths enumerated per type (env: SELFROUTE_PATH_CAP, default: {DEFAULT_PATH_CAP})",
        )

    def load_game(self) -> GameInstance:
        config = self.config
        if config.instance is not None:
            return load_instance(config.instance, config.path_cap)
        r = config.r
        if isinstance(r, list):
            if len(r) != 1:
                self.parser.error("a scenario takes a single --r value")
            r = r[0]
        return get_scenario(config.scenario).build(config.epsilon, r)

    def run(self) -> int:
        handler = getattr(self, f"run_{self.config.command}")
        try:
            return handler()
        except (SelfRouteError, ValueError) as e:
            logger.error(f"{type(e).__name__}: {e}")
            print(f"selfroute: error: {e}", file=sys.stderr)
            return EXIT_USAGE

    def run_solve(self) -> int:
        instance = self.load_game()
        config = SolverConfig.from_args(self.config)
        if self.config.method == "best-response":
            result = best_response_dynamics(instance, config)
        else:
            result = solve_equilibrium(instance, config)
        self.emit(dump_json(result.to_json()))
        return EXIT_OK

    def run_optimum(self) -> int:
        result = solve_social_optimum(self.load_game(), SolverConfig.from_args(self.config))
        self.emit(dump_json(result.to_json()))
        return EXIT_OK

    def run_classify(self) -> int:
        instance = self.load_game()
        network = TwoTerminalNetwork.from_instance(instance, self.config.type_id, prune=True)
        report = classify(network, self.config.path_cap)
        self.emit(dump_json(report.to_json()))
        return EXIT_OK

    def run_verify(self) -> int:
        name = self.config.name
        solver_config = SolverConfig.from_args(self.config)
        if self.config.instance is None and self.config.scenario is None:
            if name not in SUITES:
                self.parser.error(f"{name} needs --instance or --scenario")
            report = run_suite(name, SuiteConfig.from_args(self.config), solver_config)
            self.emit(dump_json(report.to_json()))
            return EXIT_OK if report.passed else EXIT_CHECK_FAILED

        report = analyze(self.load_game(), solver_config, self.config.relative_tol)
        checks = [c for c in report.checks if name == "all" or c.name == name]
        if not checks:
            logger.warning(f"Check {name} does not apply to this game")
        payload = report.to_json()
        payload["checks"] = [c.to_json() for c in checks]
        self.emit(dump_json(payload))
        return EXIT_CHECK_FAILED if any(c.failed for c in checks) else EXIT_OK

    def run_sweep(self) -> int:
        result = sweep_scenario(
            get_scenario(self.config.scenario),
            self.config.r_grid,
            self.config.epsilon,
            SolverConfig.from_args(self.config),
            self.config.jobs,
        )
        if self.config.format == "csv":
            self.emit(result.to_csv())
        else:
            self.emit(dump_json(result.to_json()))
        return EXIT_OK

    def run_scenario(self) -> int:
        instance = get_scenario(self.config.name).build(self.config.epsilon, self.config.r)
        self.emit(dump_instance(instance, include_paths=self.config.paths))
        return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Main entry point for the command line."""
    load_dotenv()
    try:
        command = SelfRouteCommand(argv)
    except ValueError as e:
        print(f"selfroute: error: {e}", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    sys.exit(command.run())


if __name__ == "__main__":
    main()
