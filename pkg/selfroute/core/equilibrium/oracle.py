"""
Brute-force equilibrium oracle for tiny instances, used to cross-check the solver.
"""

import itertools
import logging

import numpy as np
from scipy.optimize import minimize_scalar

from selfroute.core.constants import ORACLE_MAX_PATHS
from selfroute.core.equilibrium.objective import equilibrium_objective
from selfroute.core.errors import TooManyPaths
from selfroute.core.model.flow import FlowAssignment
from selfroute.core.model.instance import GameInstance

logger = logging.getLogger(__name__)

REFINE_SWEEPS = 200
REFINE_TOL = 1e-15


def _simplex_grid(n_paths: int, resolution: int, demand: float) -> np.ndarray:
    """All path-flow vectors whose entries are multiples of demand / resolution."""
    points = []
    for bars in itertools.combinations(range(resolution + n_paths - 1), n_paths - 1):
        edges = (-1,) + bars + (resolution + n_paths - 1,)
        points.append([edges[k + 1] - edges[k] - 1 for k in range(n_paths)])
    return np.array(points, dtype=float) * (demand / resolution)


def brute_force_equilibrium(instance: GameInstance, grid_resolution: int = 20) -> FlowAssignment:
    """
    Minimise the potential over a simplex grid, then refine by coordinate descent.

    Args:
        instance: Potential-compatible game with at most six paths in total
        grid_resolution: Number of demand increments per type

    Returns:
        FlowAssignment: The refined minimiser

    Raises:
        TooManyPaths: If the catalogs hold more than six paths together
        NotPotentialCompatible: If the instance admits no potential
    """
    if instance.total_paths > ORACLE_MAX_PATHS:
        raise TooManyPaths(instance.total_paths, ORACLE_MAX_PATHS)
    if grid_resolution < 1:
        raise ValueError(f"grid_resolution must be positive, got {grid_resolution}")

    objective = equilibrium_objective(instance)
    incidences = [instance.incidence[t] for t in instance.type_ids]
    grids = [
        _simplex_grid(m.shape[0], grid_resolution, t.demand)
        for m, t in zip(incidences, instance.types)
    ]

    # (points, types, edges) edge flows for the full product grid
    per_type_edges = [grid @ m for grid, m in zip(grids, incidences)]
    index_sets = np.array(list(itertools.product(*[range(len(g)) for g in grids])))
    stacked = np.stack(
        [per_type_edges[k][index_sets[:, k]] for k in range(len(grids))], axis=1
    )
    values = objective.batch_values(stacked)
    best = index_sets[int(np.argmin(values))]
    path_flows = [grids[k][best[k]].copy() for k in range(len(grids))]
    logger.debug(f"Oracle grid search over {len(values)} points, best potential {values.min():.6g}")

    def _value() -> float:
        return objective.value(np.vstack([h @ m for h, m in zip(path_flows, incidences)]))

    current = _value()
    for _ in range(REFINE_SWEEPS):
        start = current
        for k, h in enumerate(path_flows):
            for i, j in itertools.combinations(range(len(h)), 2):
                low, high = -h[i], h[j]
                if high - low <= 0:
                    continue
                base_i, base_j = h[i], h[j]

                def _shifted(delta: float) -> float:
                    h[i], h[j] = base_i + delta, base_j - delta
                    return _value()

                result = minimize_scalar(
                    _shifted, bounds=(low, high), method="bounded", options={"xatol": 1e-13}
                )
                h[i], h[j] = base_i, base_j
                if result.fun < current:
                    h[i], h[j] = max(base_i + result.x, 0.0), max(base_j - result.x, 0.0)
                    current = _value()
        if start - current <= REFINE_TOL * max(1.0, abs(current)):
            break

    return FlowAssignment(instance, dict(zip(instance.type_ids, path_flows)))
