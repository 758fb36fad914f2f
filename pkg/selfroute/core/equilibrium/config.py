import argparse
import os
from dataclasses import dataclass

from selfroute.core.constants import (
    DEFAULT_CHECK_TOL,
    DEFAULT_DAMPING,
    DEFAULT_GAP_TOL,
    DEFAULT_MAX_ITERATIONS,
)

STEP_RULES = ("exact-line-search", "harmonic")
DIRECTIONS = ("pairwise", "classic")
INITIALIZATIONS = ("free-flow", "last-path")


@dataclass(frozen=True)
class SolverConfig:
    """
    Settings shared by the equilibrium and social-optimum solvers.

    direction selects between pairwise moves (mass shifted from the costliest
    used path to the cheapest path of the same type) and the classic joint
    all-or-nothing Frank-Wolfe direction.
    """

    max_iterations: int = DEFAULT_MAX_ITERATIONS
    potential_gap_tol: float = DEFAULT_GAP_TOL
    step_rule: str = "exact-line-search"
    direction: str = "pairwise"
    initialization: str = "free-flow"
    equilibrium_check_tol: float = DEFAULT_CHECK_TOL
    damping: float = DEFAULT_DAMPING
    record_trace: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be positive, got {self.max_iterations}")
        if not self.potential_gap_tol > 0:
            raise ValueError(f"potential_gap_tol must be positive, got {self.potential_gap_tol}")
        if not self.equilibrium_check_tol > 0:
            raise ValueError(
                f"equilibrium_check_tol must be positive, got {self.equilibrium_check_tol}"
            )
        if not 0 < self.damping <= 1:
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")
        if self.step_rule not in STEP_RULES:
            raise ValueError(f"Unknown step rule {self.step_rule}. Available: {STEP_RULES}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"Unknown direction {self.direction}. Available: {DIRECTIONS}")
        if self.direction == "pairwise" and self.step_rule == "harmonic":
            raise ValueError("The harmonic step rule needs the classic direction")
        if self.initialization not in INITIALIZATIONS:
            raise ValueError(
                f"Unknown initialization {self.initialization}. Available: {INITIALIZATIONS}"
            )

    @classmethod
    def add_args(cls, parser: "argparse.ArgumentParser") -> None:
        """Add solver arguments; defaults can be overridden through the environment."""
        parser.add_argument(
            "--max_iterations",
            type=int,
            default=int(os.getenv("SELFROUTE_MAX_ITERATIONS", str(DEFAULT_MAX_ITERATIONS))),
            help=f"Solver iteration limit (env: SELFROUTE_MAX_ITERATIONS, default: {DEFAULT_MAX_ITERATIONS})",
        )
        parser.add_argument(
            "--gap_tol",
            type=float,
            default=float(os.getenv("SELFROUTE_GAP_TOL", str(DEFAULT_GAP_TOL))),
            help=f"Relative duality gap at which the solver stops (env: SELFROUTE_GAP_TOL, default: {DEFAULT_GAP_TOL})",
        )
        parser.add_argument(
            "--step_rule",
            type=str,
            choices=STEP_RULES,
            default=os.getenv("SELFROUTE_STEP_RULE", "exact-line-search"),
            help="Step size rule (env: SELFROUTE_STEP_RULE, default: exact-line-search)",
        )
        parser.add_argument(
            "--direction",
            type=str,
            choices=DIRECTIONS,
            default=os.getenv("SELFROUTE_DIRECTION", "pairwise"),
            help="Descent direction (env: SELFROUTE_DIRECTION, default: pairwise)",
        )
        parser.add_argument(
            "--initialization",
            type=str,
            choices=INITIALIZATIONS,
            default="free-flow",
            help="Initial all-or-nothing assignment (default: free-flow)",
        )
        parser.add_argument(
            "--check_tol",
            type=float,
            default=float(os.getenv("SELFROUTE_CHECK_TOL", str(DEFAULT_CHECK_TOL))),
            help=f"Equilibrium verification tolerance (env: SELFROUTE_CHECK_TOL, default: {DEFAULT_CHECK_TOL})",
        )
        parser.add_argument(
            "--damping",
            type=float,
            default=DEFAULT_DAMPING,
            help=f"Best-response damping factor (default: {DEFAULT_DAMPING})",
        )

    @classmethod
    def from_args(cls, args) -> "SolverConfig":
        return cls(
            max_iterations=args.max_iterations,
            potential_gap_tol=args.gap_tol,
            step_rule=args.step_rule,
            direction=args.direction,
            initialization=args.initialization,
            equilibrium_check_tol=args.check_tol,
            damping=args.damping,
        )
