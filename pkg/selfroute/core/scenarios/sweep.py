"""
Named scenarios and sweeps of the uncertainty factor.
"""

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from tabulate import tabulate

from selfroute.core.constants import GARAGE_EDGE, ONSTREET_EDGE
from selfroute.core.equilibrium.config import SolverConfig
from selfroute.core.equilibrium.solver import solve_equilibrium, solve_social_optimum
from selfroute.core.errors import SelfRouteError
from selfroute.core.model.instance import GameInstance
from selfroute.core.scenarios.named import build_braess, build_fig3, build_pigou
from selfroute.core.scenarios.parking import (
    GridCitySpec,
    apply_parking_transform,
    build_grid_city,
    default_parking_spec,
)
from selfroute.core.utils import round_significant

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("r", "cost_eq", "cost_opt", "poa", "onstreet_mass", "garage_mass")

GRID_ROWS = 4
GRID_COLS = 4


@dataclass(frozen=True)
class Scenario:
    """
    A named instance family parameterised by the uncertain share epsilon and factor r.

    onstreet_edges and garage_edges name the edges whose flow a sweep reports
    as on-street and garage mass; both are empty for scenarios without parking.
    """

    name: str
    builder: Callable
    onstreet_edges: tuple = ()
    garage_edges: tuple = ()
    description: str = ""
    default_r: float = 1.0

    def build(self, epsilon: float = 0.0, r: Optional[float] = None) -> GameInstance:
        return self.builder(epsilon, self.default_r if r is None else r)


def _parking(epsilon: float, r: float) -> GameInstance:
    return apply_parking_transform(default_parking_spec(r))


def _grid(epsilon: float, r: float) -> GameInstance:
    return build_grid_city(GRID_ROWS, GRID_COLS, GridCitySpec(r=r))


SCENARIOS = {
    scenario.name: scenario
    for scenario in (
        Scenario(
            "pigou",
            lambda epsilon, r: build_pigou(epsilon, r),
            onstreet_edges=("e2",),
            garage_edges=("e1",),
            description="Two parallel links, x and 0.25x + 2.5",
            default_r=3.0,
        ),
        Scenario(
            "fig3",
            lambda epsilon, r: build_fig3(epsilon, r),
            description="Series-parallel network that is not serially linearly independent",
            default_r=2.0,
        ),
        Scenario(
            "braess",
            lambda epsilon, r: build_braess(epsilon, r),
            description="Wheatstone network with Braess costs",
        ),
        Scenario(
            "parking",
            _parking,
            onstreet_edges=(ONSTREET_EDGE,),
            garage_edges=(GARAGE_EDGE,),
            description="Pinned parking zone with garage and through traffic",
        ),
        Scenario(
            "grid",
            _grid,
            onstreet_edges=(ONSTREET_EDGE,),
            garage_edges=(GARAGE_EDGE,),
            description=f"{GRID_ROWS}x{GRID_COLS} grid city with a parking zone",
        ),
    )
}


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise ValueError(f"Unknown scenario {name}. Available: {sorted(SCENARIOS)}") from None


@dataclass(frozen=True)
class SweepRow:
    r: float
    cost_eq: float = math.nan
    cost_opt: float = math.nan
    poa: float = math.nan
    onstreet_mass: Optional[float] = None
    garage_mass: Optional[float] = None
    error: Optional[str] = None

    def to_json(self) -> dict:
        data = {column: getattr(self, column) for column in CSV_COLUMNS}
        if self.error is not None:
            data["error"] = self.error
        return data


@dataclass(frozen=True)
class SweepResult:
    rows: tuple

    @property
    def r_grid(self) -> tuple:
        return tuple(row.r for row in self.rows)

    @property
    def errors(self) -> list:
        return [row for row in self.rows if row.error is not None]

    def row(self, r: float) -> SweepRow:
        return next(row for row in self.rows if row.r == r)

    def to_csv(self) -> str:
        """CSV with the sweep columns; an error column is added when a row failed."""
        columns = list(CSV_COLUMNS) + (["error"] if self.errors else [])
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in self.rows:
            values = []
            for column in columns:
                value = getattr(row, column)
                if isinstance(value, float):
                    value = "" if math.isnan(value) else repr(round_significant(value))
                values.append("" if value is None else value)
            writer.writerow(values)
        return buffer.getvalue()

    def to_json(self) -> dict:
        return {"rows": [row.to_json() for row in self.rows]}

    def summary_table(self) -> str:
        return tabulate(
            [[row.to_json().get(c) for c in CSV_COLUMNS] for row in self.rows],
            headers=list(CSV_COLUMNS),
            tablefmt="grid",
            numalign="right",
            stralign="left",
        )


def _mass(instance: GameInstance, flow, edge_ids: Sequence[str]) -> Optional[float]:
    if not edge_ids:
        return None
    return sum(flow.edge_flow(e) for e in edge_ids if e in instance.edge_index)


def _sweep_row(
    instance_builder: Callable,
    r: float,
    onstreet_edges: tuple,
    garage_edges: tuple,
    config: SolverConfig,
) -> SweepRow:
    try:
        instance = instance_builder(r)
        equilibrium = solve_equilibrium(instance, config)
        optimum = solve_social_optimum(instance, config)
    except SelfRouteError as e:
        logger.error(f"Sweep row r={r:g} failed: {e}")
        return SweepRow(r, error=str(e))

    cost_eq = equilibrium.social_cost
    cost_opt = optimum.potential_value
    return SweepRow(
        r=r,
        cost_eq=cost_eq,
        cost_opt=cost_opt,
        poa=cost_eq / cost_opt if cost_opt > 0 else 1.0,
        onstreet_mass=_mass(instance, equilibrium.flow, onstreet_edges),
        garage_mass=_mass(instance, equilibrium.flow, garage_edges),
    )


def sweep_uncertainty(
    instance_builder: Callable,
    r_grid: Sequence[float],
    onstreet_edges: tuple = (),
    garage_edges: tuple = (),
    config: Optional[SolverConfig] = None,
    jobs: int = 1,
) -> SweepResult:
    """
    Rebuild, solve and compare an instance for every factor of a grid.

    Args:
        instance_builder: Callable r -> GameInstance
        r_grid: Strictly increasing positive factors
        onstreet_edges: Edges whose equilibrium flow is reported as on-street mass
        garage_edges: Edges whose equilibrium flow is reported as garage mass
        config: Solver settings
        jobs: Worker threads across grid points

    Returns:
        SweepResult: One row per factor; failed rows carry the error message

    Raises:
        ValueError: If the grid is empty, not strictly increasing or not positive
    """
    r_grid = [float(r) for r in r_grid]
    if not r_grid:
        raise ValueError("Empty r grid")
    if any(r <= 0 for r in r_grid):
        raise ValueError("Uncertainty factors must be positive")
    if any(b <= a for a, b in zip(r_grid, r_grid[1:])):
        raise ValueError("r grid must be strictly increasing")
    config = config or SolverConfig()

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        rows = list(
            executor.map(
                lambda r: _sweep_row(instance_builder, r, onstreet_edges, garage_edges, config),
                r_grid,
            )
        )
    result = SweepResult(tuple(rows))
    logger.info(f".\nUncertainty sweep\n{result.summary_table()}")
    return result


def sweep_scenario(
    scenario: Scenario,
    r_grid: Sequence[float],
    epsilon: float = 0.0,
    config: Optional[SolverConfig] = None,
    jobs: int = 1,
) -> SweepResult:
    return sweep_uncertainty(
        lambda r: scenario.build(epsilon, r),
        r_grid,
        scenario.onstreet_edges,
        scenario.garage_edges,
        config,
        jobs,
    )
