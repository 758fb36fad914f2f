from selfroute.core.scenarios.named import build_braess, build_fig3, build_pigou
from selfroute.core.scenarios.parking import (
    GridCitySpec,
    ParkingSpec,
    apply_parking_transform,
    build_grid_city,
    decomposed_cost,
    default_parking_spec,
)
from selfroute.core.scenarios.sweep import (
    SCENARIOS,
    Scenario,
    SweepResult,
    get_scenario,
    sweep_scenario,
    sweep_uncertainty,
)

__all__ = [
    "SCENARIOS",
    "GridCitySpec",
    "ParkingSpec",
    "Scenario",
    "SweepResult",
    "apply_parking_transform",
    "build_braess",
    "build_fig3",
    "build_grid_city",
    "build_pigou",
    "decomposed_cost",
    "default_parking_spec",
    "get_scenario",
    "sweep_scenario",
    "sweep_uncertainty",
]
