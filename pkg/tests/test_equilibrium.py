import argparse

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfroute.core.analysis.random_instances import (
    FAMILIES,
    UNCERTAINTY_MODES,
    InstanceProfile,
    generate_random_instance,
)
from selfroute.core.equilibrium.config import SolverConfig
from selfroute.core.equilibrium.dynamics import best_response_dynamics
from selfroute.core.equilibrium.objective import (
    equilibrium_objective,
    is_potential_compatible,
    potential_value,
    social_objective,
)
from selfroute.core.equilibrium.oracle import brute_force_equilibrium
from selfroute.core.equilibrium.solver import solve_equilibrium, solve_social_optimum
from selfroute.core.equilibrium.verify import verify_equilibrium
from selfroute.core.errors import DidNotConverge, NotPotentialCompatible, TooManyPaths
from selfroute.core.model.cost import CostFunction
from selfroute.core.model.evaluation import social_cost
from selfroute.core.model.flow import FlowAssignment
from selfroute.core.model.instance import Edge, GameInstance, UserType
from selfroute.core.scenarios.named import build_braess, build_fig3, build_pigou


def _crossed_pigou() -> GameInstance:
    """Both types share e1 and e2 but disagree on which one is congested."""
    edges = [
        Edge("e1", "s", "t", CostFunction(1.0, 0.5)),
        Edge("e2", "s", "t", CostFunction(1.0, 0.0)),
    ]
    types = [
        UserType("theta1", "s", "t", 0.5, {"e1": 1.0, "e2": 2.0}),
        UserType("theta2", "s", "t", 0.5, {"e1": 2.0, "e2": 1.0}),
    ]
    return GameInstance.build(["s", "t"], edges, types)


class TestSolverConfig:
    def test_defaults(self):
        config = SolverConfig()
        assert config.direction == "pairwise"
        assert config.step_rule == "exact-line-search"

    @pytest.mark.parametrize(
        "overrides",
        [
            {"max_iterations": 0},
            {"potential_gap_tol": 0.0},
            {"damping": 0.0},
            {"damping": 1.5},
            {"step_rule": "armijo"},
            {"direction": "pairwise", "step_rule": "harmonic"},
            {"initialization": "random"},
        ],
    )
    def test_invalid(self, overrides):
        with pytest.raises(ValueError):
            SolverConfig(**overrides)

    def test_from_args(self, monkeypatch):
        monkeypatch.setenv("SELFROUTE_MAX_ITERATIONS", "77")
        parser = argparse.ArgumentParser()
        SolverConfig.add_args(parser)
        config = SolverConfig.from_args(parser.parse_args(["--direction", "classic", "--gap_tol", "1e-8"]))
        assert config.max_iterations == 77
        assert config.direction == "classic"
        assert config.potential_gap_tol == 1e-8


class TestCompatibility:
    def test_scalar(self, fig3):
        result = is_potential_compatible(fig3)
        assert result and result.mode == "scalar"

    def test_edge_dependent(self):
        edges = [Edge("e1", "s", "t", CostFunction(1.0, 0.0)), Edge("e2", "s", "t", CostFunction(1.0, 1.0))]
        shared = {"e1": 2.0, "e2": 1.0}
        types = [UserType("theta1", "s", "t", 0.5, shared), UserType("theta2", "s", "t", 0.5, shared)]
        result = is_potential_compatible(GameInstance.build(["s", "t"], edges, types))
        assert result and result.mode == "edge-dependent"

    def test_incompatible(self):
        result = is_potential_compatible(_crossed_pigou())
        assert not result
        assert result.edge_id == "e1"
        with pytest.raises(NotPotentialCompatible):
            equilibrium_objective(_crossed_pigou())
        with pytest.raises(NotPotentialCompatible):
            solve_equilibrium(_crossed_pigou())

    def test_social_objective_is_social_cost(self, braess):
        flow = FlowAssignment(braess, {"theta1": [0.5, 0.0, 0.5], "theta2": [0.0, 0.0, 0.0]})
        assert social_objective(braess).flow_value(flow) == pytest.approx(social_cost(braess, flow))

    def test_potential_value(self, two_link):
        flow = FlowAssignment(two_link, {"theta1": [0.5, 0.5]})
        # 0.125 + 0.5 on e1, 0.25 on e2
        assert potential_value(two_link, flow) == pytest.approx(0.875)


class TestSolveEquilibrium:
    def test_two_link(self, two_link):
        result = solve_equilibrium(two_link)
        assert result.converged
        # x + 1 = 2(1 - x)
        assert result.flow.edge_flow("e1") == pytest.approx(1 / 3)
        assert result.verification.passed

    @pytest.mark.parametrize("epsilon", [0.0, 0.05, 0.1, 2 / 15])
    def test_pigou_cautious_minority(self, epsilon):
        result = solve_equilibrium(build_pigou(epsilon, 3.0))
        assert result.social_cost == pytest.approx(1 + 0.5 * epsilon + 1.25 * epsilon**2, abs=1e-8)
        assert result.flow.edge_flow("e1") == pytest.approx(epsilon, abs=1e-8)

    @pytest.mark.parametrize("epsilon", [0.2, 0.5, 1.0])
    def test_pigou_saturated(self, epsilon):
        result = solve_equilibrium(build_pigou(epsilon, 3.0))
        assert result.flow.edge_flow("e1") == pytest.approx(2 / 15, abs=1e-8)
        assert result.flow.edge_flow("e1", "theta1") == pytest.approx(0.0, abs=1e-8)

    def test_pigou_everyone_uncertain(self):
        result = solve_equilibrium(build_pigou(1.0, 3.0))
        assert result.social_cost == pytest.approx(1.0888888889, abs=1e-8)

    def test_fig3_certain(self, fig3):
        result = solve_equilibrium(fig3)
        np.testing.assert_allclose(
            result.flow.aggregate_path_flows(), [4 / 21, 3 / 7, 8 / 21, 0.0, 0.0], atol=1e-8
        )
        assert result.social_cost == pytest.approx(62 / 21, abs=1e-9)

    def test_fig3_uncertain_minority(self):
        instance = build_fig3(0.05, 2.0)
        result = solve_equilibrium(instance)
        assert result.verification.passed
        np.testing.assert_allclose(
            result.flow.aggregate_path_flows(), [4 / 21, 3 / 7, 8 / 21, 0.0, 0.0], atol=1e-7
        )
        assert result.social_cost == pytest.approx(62 / 21, abs=1e-8)

    def test_braess(self, braess):
        result = solve_equilibrium(braess)
        assert result.social_cost == pytest.approx(2.0, abs=1e-7)
        assert result.flow.edge_flow("e5") == pytest.approx(1.0, abs=1e-6)

    def test_classic_direction_agrees(self, fig3):
        classic = SolverConfig(direction="classic", potential_gap_tol=1e-6)
        result = solve_equilibrium(fig3, classic)
        assert result.social_cost == pytest.approx(62 / 21, abs=5e-3)

    def test_last_path_initialisation(self, fig3):
        result = solve_equilibrium(fig3, SolverConfig(initialization="last-path"))
        assert result.social_cost == pytest.approx(62 / 21, abs=1e-8)

    def test_polynomial_costs(self):
        edges = [
            Edge("e1", "s", "t", CostFunction(1.0, 0.0, 3)),
            Edge("e2", "s", "t", CostFunction(0.0, 1.0, 3)),
        ]
        instance = GameInstance.build(["s", "t"], edges, [UserType("theta", "s", "t", 1.0, 2.0)])
        result = solve_equilibrium(instance)
        # 2 x^3 = 1
        assert result.flow.edge_flow("e1") == pytest.approx(0.5 ** (1 / 3), abs=1e-8)

    def test_zero_demand_type(self, pigou):
        result = solve_equilibrium(pigou)
        assert result.flow.path_flows["theta2"].sum() == 0.0
        assert result.social_cost == pytest.approx(1.0)

    def test_iteration_limit(self, fig3):
        result = solve_equilibrium(fig3, SolverConfig(max_iterations=1, direction="classic"))
        assert not result.converged
        with pytest.raises(DidNotConverge):
            result.raise_for_convergence()

    def test_trace(self, fig3):
        result = solve_equilibrium(fig3, SolverConfig(record_trace=True))
        assert len(result.trace) == result.iterations + 1
        assert all(later <= earlier + 1e-10 for earlier, later in zip(result.trace, result.trace[1:]))

    def test_to_json(self, two_link):
        data = solve_equilibrium(two_link).to_json()
        assert data["converged"] is True
        assert set(data["edge_flows"]) == {"e1", "e2"}
        assert data["verification"]["passed"] is True


class TestSocialOptimum:
    def test_braess(self, braess):
        result = solve_social_optimum(braess)
        assert result.potential_value == pytest.approx(1.5, abs=1e-8)
        assert result.flow.edge_flow("e5") == pytest.approx(0.0, abs=1e-4)

    def test_pigou(self):
        assert solve_social_optimum(build_pigou(1.0, 3.0)).potential_value == pytest.approx(1.0)

    def test_ignores_uncertainty(self, fig3):
        a = solve_social_optimum(fig3).potential_value
        b = solve_social_optimum(fig3.with_uniform_uncertainty(0.3)).potential_value
        assert a == pytest.approx(b, abs=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(
        seed=st.integers(0, 10_000),
        family=st.sampled_from(FAMILIES),
        uncertainty=st.sampled_from(UNCERTAINTY_MODES),
        degree=st.integers(1, 2),
    )
    def test_never_worse_than_equilibrium(self, seed, family, uncertainty, degree):
        profile = InstanceProfile(family=family, uncertainty=uncertainty, degree=degree)
        instance = generate_random_instance(seed, profile)
        optimum = solve_social_optimum(instance)
        equilibrium = solve_equilibrium(instance)
        assert optimum.social_cost == pytest.approx(optimum.potential_value, rel=1e-9)
        assert optimum.potential_value <= equilibrium.social_cost * (1 + 1e-9)


class TestVerify:
    def test_published_row_is_not_an_equilibrium(self):
        instance = build_fig3(0.05, 2.0)
        flow = FlowAssignment(
            instance,
            {"theta1": [11 / 60, 23 / 60, 23 / 60, 0.0, 0.0], "theta2": [0.0, 0.0, 0.0, 1 / 20, 0.0]},
        )
        report = verify_equilibrium(instance, flow)
        assert not report.passed
        assert {v.type_id for v in report.violations} == {"theta2"}
        assert report.violations[0].excess == pytest.approx(0.5, abs=1e-9)
        assert social_cost(instance, flow) == pytest.approx(591 / 200)

    def test_flow_from_other_instance(self, fig3):
        flow = solve_equilibrium(fig3).flow
        assert verify_equilibrium(build_fig3(0.0, 2.0), flow).passed

    def test_missing_factor_fails_without_raising(self):
        edges = [Edge("e1", "s", "t", CostFunction(1.0, 0.0)), Edge("e2", "s", "t", CostFunction(1.0, 0.0))]
        instance = GameInstance.build(["s", "t"], edges, [UserType("theta", "s", "t", 1.0, {"e1": 1.0})])
        flow = FlowAssignment(instance, {"theta": [0.5, 0.5]})
        report = verify_equilibrium(instance, flow)
        assert not report.passed
        assert "e2" in report.message


class TestOracle:
    @pytest.mark.parametrize("epsilon", [0.1, 0.5])
    def test_matches_solver(self, epsilon):
        instance = build_pigou(epsilon, 3.0)
        oracle = brute_force_equilibrium(instance)
        solved = solve_equilibrium(instance).flow
        np.testing.assert_allclose(oracle.total_edge_flows, solved.total_edge_flows, atol=1e-4)

    def test_path_limit(self, fig3):
        with pytest.raises(TooManyPaths):
            brute_force_equilibrium(fig3)

    def test_invalid_resolution(self, pigou):
        with pytest.raises(ValueError):
            brute_force_equilibrium(pigou, grid_resolution=0)


class TestBestResponse:
    def test_matches_potential_minimiser(self):
        instance = build_pigou(0.5, 3.0)
        result = best_response_dynamics(instance)
        assert result.converged
        assert result.objective == "best-response"
        np.testing.assert_allclose(
            result.flow.total_edge_flows, solve_equilibrium(instance).flow.total_edge_flows, atol=1e-5
        )

    def test_runs_without_potential(self):
        result = best_response_dynamics(_crossed_pigou())
        assert np.isnan(result.potential_value)
        assert result.verification is not None
