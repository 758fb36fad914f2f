from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfroute.core.analysis.random_instances import (
    FAMILIES,
    InstanceProfile,
    generate_random_instance,
    random_feasible_flow,
)
from selfroute.core.errors import (
    InfeasibleFlow,
    InvalidInstance,
    MissingUncertainty,
    NoPath,
    PathExplosion,
)
from selfroute.core.model.cost import CostFunction
from selfroute.core.model.evaluation import (
    perceived_path_cost,
    perceived_path_costs,
    social_cost,
    true_path_cost,
    true_path_costs,
    type_aggregate_cost,
)
from selfroute.core.model.flow import FlowAssignment
from selfroute.core.model.instance import Edge, GameInstance, UserType
from selfroute.core.model.paths import Arc, enumerate_paths
from selfroute.core.scenarios.named import build_pigou
from selfroute.core.topology.grammar import parallel_network


class TestCostFunction:
    def test_evaluate_and_perceived(self):
        cost = CostFunction(2.0, 1.0, 2)
        assert cost.evaluate(3.0) == pytest.approx(19.0)
        assert cost.perceived(3.0, 0.5) == pytest.approx(10.0)
        assert cost.derivative(3.0) == pytest.approx(12.0)
        assert cost.marginal(3.0) == pytest.approx(3 * 18.0 + 1.0)
        assert cost.integral(3.0) == pytest.approx(2.0 * 27 / 3 + 3.0)

    @pytest.mark.parametrize("a, b, d", [(-1.0, 0.0, 1), (1.0, -0.1, 1), (1.0, 0.0, 0), (1.0, 0.0, 1.5)])
    def test_invalid_coefficients(self, a, b, d):
        with pytest.raises(InvalidInstance):
            CostFunction(a, b, d)


class TestUserType:
    def test_scalar_uncertainty(self):
        user_type = UserType("theta", "s", "t", 1.0, 2.0)
        assert not user_type.is_edge_dependent
        assert user_type.r_on("anything") == 2.0
        assert user_type.scalar_on(["e1", "e2"]) == 2.0

    def test_edge_map(self):
        user_type = UserType("theta", "s", "t", 1.0, {"e1": 2.0, "e2": 2.0, "e3": 1.0})
        assert user_type.is_edge_dependent
        assert user_type.scalar_on(["e1", "e2"]) == 2.0
        assert user_type.scalar_on(["e1", "e3"]) is None
        assert user_type.scalar_on(["e4"]) is None
        with pytest.raises(MissingUncertainty):
            user_type.r_on("e4")

    @pytest.mark.parametrize("demand, r", [(-1.0, 1.0), (float("nan"), 1.0), (1.0, 0.0), (1.0, -2.0)])
    def test_invalid(self, demand, r):
        with pytest.raises(InvalidInstance):
            UserType("theta", "s", "t", demand, r)

    def test_zero_demand_is_allowed(self):
        assert UserType("theta", "s", "t", 0.0).demand == 0.0


class TestGameInstance:
    def test_build_enumerates_paths(self, fig3, pigou):
        assert pigou.paths("theta1") == (("e1",), ("e2",))
        assert len(fig3.paths("theta2")) == 5
        assert pigou.degree == 1
        assert pigou.total_paths == 4

    def test_mixed_degrees(self):
        edges = [
            Edge("e1", "s", "t", CostFunction(1.0, 0.0, 1)),
            Edge("e2", "s", "t", CostFunction(1.0, 0.0, 2)),
        ]
        with pytest.raises(InvalidInstance, match="degree"):
            GameInstance.build(["s", "t"], edges, [UserType("theta", "s", "t", 1.0)])

    def test_self_loop(self):
        with pytest.raises(InvalidInstance):
            Edge("e1", "s", "s", CostFunction(1.0, 0.0))

    def test_duplicate_edges(self):
        edges = [Edge("e1", "s", "t", CostFunction(1.0, 0.0))] * 2
        with pytest.raises(InvalidInstance, match="Duplicate edge"):
            GameInstance.build(["s", "t"], edges, [UserType("theta", "s", "t", 1.0)])

    def test_unreachable_sink(self):
        edges = [Edge("e1", "t", "s", CostFunction(1.0, 0.0))]
        with pytest.raises(NoPath):
            GameInstance.build(["s", "t"], edges, [UserType("theta", "s", "t", 1.0)])

    def test_unknown_terminal(self):
        edges = [Edge("e1", "s", "t", CostFunction(1.0, 0.0))]
        with pytest.raises(InvalidInstance):
            GameInstance.build(["s", "t"], edges, [UserType("theta", "s", "x", 1.0)])

    def test_uncertainty_on_unknown_edge(self):
        edges = [Edge("e1", "s", "t", CostFunction(1.0, 0.0))]
        with pytest.raises(InvalidInstance, match="unknown edges"):
            GameInstance.build(
                ["s", "t"], edges, [UserType("theta", "s", "t", 1.0, {"e1": 1.0, "e9": 2.0})]
            )

    def test_catalog_override_must_be_walks(self):
        edges = [
            Edge("e1", "s", "i", CostFunction(1.0, 0.0)),
            Edge("e2", "i", "t", CostFunction(1.0, 0.0)),
        ]
        types = [UserType("theta", "s", "t", 1.0)]
        with pytest.raises(InvalidInstance, match="not a walk"):
            GameInstance.build(["s", "i", "t"], edges, types, paths={"theta": [["e2", "e1"]]})

    @pytest.mark.parametrize(
        "catalog, message",
        [
            ([["e1", "e2"], ["e9"]], "unknown edge e9"),
            ([["e1"]], "does not end at t"),
            ([["e3"], ["e2"]], "not a walk"),
            ([["e1", "e2", "e4", "e3"]], "not simple"),
        ],
    )
    def test_catalog_override_checks_every_path(self, catalog, message):
        edges = [
            Edge("e1", "s", "i", CostFunction(1.0, 0.0)),
            Edge("e2", "i", "t", CostFunction(1.0, 0.0)),
            Edge("e3", "s", "t", CostFunction(1.0, 1.0)),
            Edge("e4", "t", "s", CostFunction(1.0, 0.0)),
        ]
        types = [UserType("theta", "s", "t", 1.0)]
        with pytest.raises(InvalidInstance, match=message):
            GameInstance.build(["s", "i", "t"], edges, types, paths={"theta": catalog})

    def test_undirected_links(self):
        edges = [
            Edge("e1", "s", "i", CostFunction(1.0, 0.0)),
            Edge("e2", "t", "i", CostFunction(1.0, 0.0)),
        ]
        instance = GameInstance.build(
            ["s", "i", "t"], edges, [UserType("theta", "s", "t", 1.0)], undirected=True
        )
        assert instance.paths("theta") == (("e1", "e2"),)

    def test_with_uncertainty_keeps_catalog(self, fig3):
        twin = fig3.with_uniform_uncertainty(1.0)
        assert dict(twin.path_catalog) == dict(fig3.path_catalog)
        assert all(t.uncertainty == 1.0 for t in twin.types)
        assert fig3.type("theta2").uncertainty == 2.0

    def test_with_demands(self, pigou):
        scaled = pigou.with_demands({"theta2": 0.5})
        assert scaled.type("theta2").demand == 0.5
        assert scaled.type("theta1").demand == pigou.type("theta1").demand
        with pytest.raises(InvalidInstance):
            pigou.with_demands({"theta1": -1.0})

    def test_uncertainty_matrix(self):
        edges = [
            Edge("e1", "s", "t", CostFunction(1.0, 0.0)),
            Edge("e2", "s", "t", CostFunction(1.0, 0.0)),
        ]
        instance = GameInstance.build(
            ["s", "t"],
            edges,
            [UserType("theta1", "s", "t", 1.0, 2.0), UserType("theta2", "s", "t", 1.0, {"e1": 3.0})],
            paths={"theta2": [["e1"]]},
        )
        matrix = instance.uncertainty_matrix
        np.testing.assert_allclose(matrix[0], [2.0, 2.0])
        assert matrix[1, 0] == 3.0
        assert np.isnan(matrix[1, 1])


class TestPaths:
    def test_natural_order(self):
        arcs = [Arc(f"e{i}", "s", "t") for i in (10, 2, 1)]
        assert enumerate_paths(arcs, "s", "t") == (("e1",), ("e2",), ("e10",))

    def test_cap(self):
        network = parallel_network(5)
        with pytest.raises(PathExplosion) as excinfo:
            enumerate_paths(network.arcs, "s", "t", cap=3)
        assert excinfo.value.cap == 3

    def test_invalid_cap(self):
        with pytest.raises(ValueError):
            enumerate_paths([Arc("e1", "s", "t")], "s", "t", cap=0)

    def test_concurrent_builds(self):
        def catalog(k):
            edges = [
                Edge(f"a{k}", "s", "m", CostFunction(1.0, 0.0)),
                Edge(f"b{k}", "m", "t", CostFunction(1.0, 0.0)),
            ]
            instance = GameInstance.build(["s", "m", "t"], edges, [UserType("theta", "s", "t", 1.0)])
            return k, instance.paths("theta")

        with ThreadPoolExecutor(max_workers=16) as executor:
            results = list(executor.map(catalog, range(4000)))
        assert all(paths == ((f"a{k}", f"b{k}"),) for k, paths in results)


class TestFlowAssignment:
    def test_edge_flows(self, fig3):
        flow = FlowAssignment(fig3, {"theta1": [1.0, 0, 0, 0, 0], "theta2": [0, 0, 0, 0, 0]})
        assert flow.edge_flow("e1") == 1.0
        assert flow.edge_flow("e1", "theta2") == 0.0

    def test_from_path_flows(self):
        instance = build_pigou(epsilon=0.2)
        flow = FlowAssignment.from_path_flows(instance, {"theta1": [0.0, 0.8], "theta2": [0.2, 0.0]})
        assert flow.edge_flow("e1") == pytest.approx(0.2)
        assert flow.to_json()["path_flows"]["theta1"] == {"e1": 0.0, "e2": 0.8}

    def test_demand_mismatch(self, pigou):
        with pytest.raises(InfeasibleFlow):
            FlowAssignment(pigou, {"theta1": [0.5, 0.4], "theta2": [0.0, 0.0]})

    def test_negative_flow(self, pigou):
        with pytest.raises(InfeasibleFlow):
            FlowAssignment(pigou, {"theta1": [1.5, -0.5], "theta2": [0.0, 0.0]})

    def test_wrong_shape(self, pigou):
        with pytest.raises(InfeasibleFlow):
            FlowAssignment(pigou, {"theta1": [1.0], "theta2": [0.0, 0.0]})

    def test_proportional(self):
        instance = build_pigou(epsilon=0.25)
        flow = FlowAssignment.proportional(instance, [0.4, 0.6])
        np.testing.assert_allclose(flow.path_flows["theta2"], [0.1, 0.15])
        np.testing.assert_allclose(flow.aggregate_path_flows(), [0.4, 0.6])


class TestEvaluation:
    def test_costs(self):
        instance = build_pigou(epsilon=0.2, r=3.0)
        flow = FlowAssignment(instance, {"theta1": [0.0, 0.8], "theta2": [0.2, 0.0]})
        user_type = instance.type("theta2")
        assert true_path_cost(flow, ("e2",)) == pytest.approx(0.8)
        assert perceived_path_cost(flow, ("e2",), user_type) == pytest.approx(2.4)
        np.testing.assert_allclose(perceived_path_costs(flow, "theta2"), [0.15 + 2.5, 2.4])
        np.testing.assert_allclose(true_path_costs(flow, "theta1"), [2.55, 0.8])
        assert social_cost(instance, flow) == pytest.approx(1 + 0.5 * 0.2 + 1.25 * 0.04)
        assert type_aggregate_cost(instance, flow, "theta1") == pytest.approx(0.64)

    def test_missing_factor(self):
        edges = [
            Edge("e1", "s", "t", CostFunction(1.0, 0.0)),
            Edge("e2", "s", "t", CostFunction(1.0, 0.0)),
        ]
        instance = GameInstance.build(
            ["s", "t"], edges, [UserType("theta", "s", "t", 1.0, {"e1": 2.0})]
        )
        flow = FlowAssignment(instance, {"theta": [1.0, 0.0]})
        with pytest.raises(MissingUncertainty):
            perceived_path_costs(flow, "theta")


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), family=st.sampled_from(FAMILIES), n_types=st.integers(1, 3))
def test_type_costs_add_up_to_social_cost(seed, family, n_types):
    instance = generate_random_instance(seed, InstanceProfile(family=family, n_types=n_types))
    flow = random_feasible_flow(instance, np.random.default_rng(seed))
    total = sum(type_aggregate_cost(instance, flow, type_id) for type_id in instance.type_ids)
    assert total == pytest.approx(social_cost(instance, flow), rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), family=st.sampled_from(FAMILIES))
def test_social_cost_ignores_catalog_order(seed, family):
    instance = generate_random_instance(seed, InstanceProfile(family=family))
    rng = np.random.default_rng(seed)
    flow = random_feasible_flow(instance, rng)

    orders = {t: rng.permutation(len(instance.paths(t))) for t in instance.type_ids}
    shuffled = GameInstance.build(
        instance.nodes,
        instance.edges,
        instance.types,
        undirected=instance.undirected,
        paths={t: [instance.paths(t)[i] for i in order] for t, order in orders.items()},
    )
    shuffled_flow = FlowAssignment(
        shuffled, {t: flow.path_flows[t][order] for t, order in orders.items()}
    )
    np.testing.assert_allclose(shuffled_flow.total_edge_flows, flow.total_edge_flows, atol=1e-12)
    assert social_cost(shuffled, shuffled_flow) == pytest.approx(social_cost(instance, flow), rel=1e-12)
