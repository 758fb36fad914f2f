import numpy as np
import pytest

from selfroute.core.analysis.bounds import poa_bound_linear
from selfroute.core.analysis.checks import (
    analytic_poa_bound,
    check_cor1,
    check_lemma1,
    check_lemma2,
    check_lemma3,
    check_lemma5,
    check_poa_bound,
    check_thm1,
    check_thm3,
    check_thm4,
    empirical_poa,
    two_commodity_types,
    uniform_factor,
)
from selfroute.core.analysis.random_instances import random_feasible_flow
from selfroute.core.analysis.report import analyze
from selfroute.core.equilibrium.solver import solve_equilibrium, solve_social_optimum
from selfroute.core.errors import BoundUndefined, CheckPreconditionError, TopologyMismatch
from selfroute.core.model.cost import CostFunction
from selfroute.core.model.flow import FlowAssignment
from selfroute.core.model.instance import Edge, GameInstance, UserType
from selfroute.core.scenarios.named import build_braess, build_fig3, build_pigou


class TestThm1:
    @pytest.mark.parametrize("r", [1.0, 1.5, 2.0])
    def test_cautious_users_help(self, braess, r):
        result = check_thm1(braess, r)
        assert result.name == "thm1"
        assert result.holds and result.in_hypothesis
        assert result.margin >= -1e-9

    def test_overconfidence_hurts(self, two_link):
        result = check_thm1(two_link, 0.5)
        assert result.holds
        assert result.margin < 0

    def test_out_of_hypothesis(self, braess):
        result = check_thm1(braess, 5.0)
        assert not result.in_hypothesis
        assert not result.failed

    def test_braess_gain(self, braess):
        # With r = 2 the bridge is no longer attractive
        result = check_thm1(braess, 2.0)
        assert result.details["cost_certain"] == pytest.approx(2.0, abs=1e-7)
        assert result.details["cost_uncertain"] == pytest.approx(1.5, abs=1e-7)

    def test_polynomial_name(self):
        edges = [
            Edge("e1", "s", "t", CostFunction(1.0, 0.0, 2)),
            Edge("e2", "s", "t", CostFunction(0.0, 1.0, 2)),
        ]
        instance = GameInstance.build(["s", "t"], edges, [UserType("theta", "s", "t", 1.0)])
        result = check_thm1(instance, 3.0)
        assert result.name == "prop3"
        assert result.holds and result.in_hypothesis


def test_cor1(braess, fig3):
    for instance in (braess, fig3):
        result = check_cor1(instance)
        assert result.holds
        assert result.details["r"] == 2.0


class TestLemma1:
    def test_against_optimum(self):
        instance = build_fig3(0.3, 1.5)
        reference = solve_social_optimum(instance).flow
        assert check_lemma1(instance, reference).holds

    def test_random_references(self):
        instance = build_fig3(0.4, 0.7)
        rng = np.random.default_rng(3)
        for _ in range(5):
            assert check_lemma1(instance, random_feasible_flow(instance, rng)).holds

    def test_equilibrium_reference_is_tight(self, braess):
        flow = solve_equilibrium(braess).flow
        result = check_lemma1(braess, flow, equilibrium=flow)
        assert result.margin == pytest.approx(0.0, abs=1e-12)

    def test_skips_edge_maps(self):
        edges = [Edge("e1", "s", "t", CostFunction(1.0, 0.0)), Edge("e2", "s", "t", CostFunction(1.0, 1.0))]
        instance = GameInstance.build(
            ["s", "t"], edges, [UserType("theta", "s", "t", 1.0, {"e1": 2.0, "e2": 1.0})]
        )
        flow = FlowAssignment(instance, {"theta": [0.5, 0.5]})
        result = check_lemma1(instance, flow)
        assert result.skipped and not result.failed


class TestLemma2:
    def test_tight_case(self):
        result = check_lemma2([1.0], [0.5], [1.0], 1.0, 0.0)
        assert result.details["ratio"] == pytest.approx(4 / 3)
        assert result.holds

    def test_spread(self):
        result = check_lemma2([0.4, 0.6], [0.2, 0.1], [1.0, 1.2], 2.0, 0.5)
        assert result.holds
        assert result.details["bound"] == pytest.approx(4 / (4 - 1.44))

    def test_undefined(self):
        result = check_lemma2([1.0, 1.0], [0.5, 0.5], [0.5, 2.0], 1.0, 0.0)
        assert result.skipped

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            check_lemma2([-1.0], [0.5], [1.0], 1.0, 0.0)


@pytest.mark.parametrize("a, b, d, x1, x2", [(1.0, 0.0, 2, 1.0, 3.0), (2.0, 1.0, 1, 2.0, 0.5), (0.5, 0.0, 4, 0.0, 0.0)])
def test_lemma5(a, b, d, x1, x2):
    assert check_lemma5(a, b, d, x1, x2).holds


class TestTwoCommodity:
    def test_types(self):
        certain, uncertain = two_commodity_types(build_pigou(0.2, 3.0))
        assert (certain.id, uncertain.id) == ("theta1", "theta2")

    def test_precondition(self, two_link):
        with pytest.raises(CheckPreconditionError):
            two_commodity_types(two_link)

    def test_thm3_on_pigou(self):
        result = check_thm3(build_pigou(0.2, 3.0))
        assert result.in_hypothesis and result.holds
        assert result.details["type_cost_uncertain"] == pytest.approx(0.8 * 13 / 15, abs=1e-7)
        assert result.details["type_cost_certain"] == pytest.approx(0.8, abs=1e-7)

    def test_thm3_outside_series_parallel(self):
        instance = build_braess(0.3, 1.5)
        result = check_thm3(instance)
        assert not result.in_hypothesis
        with pytest.raises(TopologyMismatch):
            check_thm3(instance, strict=True)

    def test_thm4_hypothesis(self, series_parallel):
        result = check_thm4(series_parallel)
        assert result.in_hypothesis and result.holds

    def test_thm4_factor_outside_range(self):
        result = check_thm4(build_pigou(0.3, 3.0))
        assert not result.in_hypothesis
        assert "outside [1, 2]" in result.message

    def test_thm4_fig3_is_not_sli(self):
        result = check_thm4(build_fig3(0.05, 2.0))
        assert not result.in_hypothesis
        with pytest.raises(TopologyMismatch):
            check_thm4(build_fig3(0.05, 2.0), strict=True)

    def test_lemma3(self):
        result = check_lemma3(build_pigou(0.4, 1.5))
        assert result.in_hypothesis and result.holds


class TestPriceOfAnarchy:
    def test_braess(self, braess):
        assert empirical_poa(braess) == pytest.approx(4 / 3, abs=1e-6)
        result = check_poa_bound(braess)
        assert result.name == "thm2"
        assert result.holds
        assert result.margin == pytest.approx(0.0, abs=1e-6)

    def test_bound_with_spread(self):
        instance = build_pigou(0.5, 1.5)
        assert analytic_poa_bound(instance) == pytest.approx(poa_bound_linear(1.5, 1 / 1.5))
        assert check_poa_bound(instance).holds

    def test_skipped_when_undefined(self):
        result = check_poa_bound(build_pigou(0.5, 4.0))
        assert result.skipped

    def test_edge_dependent_nonlinear(self):
        edges = [Edge("e1", "s", "t", CostFunction(1.0, 0.0, 2)), Edge("e2", "s", "t", CostFunction(1.0, 1.0, 2))]
        shared = {"e1": 1.5, "e2": 1.0}
        types = [UserType("theta1", "s", "t", 0.5, shared), UserType("theta2", "s", "t", 0.5, shared)]
        instance = GameInstance.build(["s", "t"], edges, types)
        with pytest.raises(BoundUndefined):
            analytic_poa_bound(instance)
        assert check_poa_bound(instance).name == "edge_poa"


class TestAnalyze:
    def test_pigou(self):
        report = analyze(build_pigou(1.0, 3.0))
        assert report.social_cost_equilibrium == pytest.approx(1.0888888889, abs=1e-8)
        assert report.social_cost_optimum == pytest.approx(1.0, abs=1e-9)
        assert report.empirical_poa == pytest.approx(1.0888888889, abs=1e-8)
        # only theta2 routes, so r_max = 3 and gamma = 1
        assert report.analytic_poa_bound == pytest.approx(4 / 3)
        names = [check.name for check in report.checks]
        assert names[:3] == ["cor1", "thm2", "lemma1"]
        thm2 = report.checks[1]
        assert thm2.holds and not thm2.skipped
        assert thm2.margin == pytest.approx(4 / 3 - 1.0888888889, abs=1e-6)
        assert {"thm3", "thm4", "lemma3"} <= set(names)
        assert not report.failures

    def test_uniform_factor(self, fig3):
        assert uniform_factor(fig3.with_uniform_uncertainty(1.5)) == 1.5
        assert uniform_factor(build_fig3(0.1, 2.0)) is None

    def test_summary_and_json(self, braess):
        report = analyze(braess)
        assert "cor1" in report.summary_table()
        data = report.to_json()
        assert data["compatibility"]["mode"] == "scalar"
        assert len(data["checks"]) == len(report.checks)
