from selfroute.core.equilibrium.config import SolverConfig
from selfroute.core.equilibrium.dynamics import best_response_dynamics
from selfroute.core.equilibrium.objective import (
    CompatibilityResult,
    is_potential_compatible,
    potential_value,
)
from selfroute.core.equilibrium.oracle import brute_force_equilibrium
from selfroute.core.equilibrium.solver import SolveResult, solve_equilibrium, solve_social_optimum
from selfroute.core.equilibrium.verify import EquilibriumReport, verify_equilibrium

__all__ = [
    "CompatibilityResult",
    "EquilibriumReport",
    "SolveResult",
    "SolverConfig",
    "best_response_dynamics",
    "brute_force_equilibrium",
    "is_potential_compatible",
    "potential_value",
    "solve_equilibrium",
    "solve_social_optimum",
    "verify_equilibrium",
]
