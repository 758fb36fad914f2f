import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfroute.core.analysis.bounds import (
    UncertaintyProfile,
    poa_bound_edge_dependent,
    poa_bound_linear,
    poa_bound_polynomial,
)
from selfroute.core.errors import BoundUndefined
from selfroute.core.scenarios.named import build_pigou


def test_linear_bound_without_uncertainty():
    assert poa_bound_linear(1.0, 1.0) == pytest.approx(4 / 3)


def test_linear_bound_with_spread():
    assert poa_bound_linear(1.5, 0.9) == pytest.approx(4 / 3.15)


def test_linear_bound_at_optimum_factor():
    # 4 / (8 - 4)
    assert poa_bound_linear(2.0, 1.0) == pytest.approx(1.0)


@pytest.mark.parametrize("r_max, gamma", [(2.0, 0.5), (4.0, 1.0), (5.0, 1.0)])
def test_linear_bound_undefined(r_max, gamma):
    with pytest.raises(BoundUndefined):
        poa_bound_linear(r_max, gamma)


@pytest.mark.parametrize("r_max, gamma", [(0.0, 1.0), (1.0, 0.0), (1.0, 1.2)])
def test_invalid_profile(r_max, gamma):
    with pytest.raises(ValueError):
        poa_bound_linear(r_max, gamma)


@settings(max_examples=1000)
@given(r_max=st.floats(0.01, 3.99), data=st.data())
def test_polynomial_reduces_to_linear(r_max, data):
    # the linear bound is defined exactly when 4 gamma > r_max
    gamma = data.draw(st.floats(min_value=r_max / 4, max_value=1.0, exclude_min=True))
    assert poa_bound_polynomial(r_max, gamma, 1) == pytest.approx(poa_bound_linear(r_max, gamma), rel=1e-12)


def test_polynomial_bound_without_uncertainty():
    # Known price of anarchy for quadratic costs: 3 sqrt(3) / (3 sqrt(3) - 2)
    expected = 3 * 3**0.5 / (3 * 3**0.5 - 2)
    assert poa_bound_polynomial(1.0, 1.0, 2) == pytest.approx(expected)


def test_polynomial_bound_undefined():
    with pytest.raises(BoundUndefined):
        poa_bound_polynomial(30.0, 1.0, 2)


def test_profile_from_instance():
    profile = UncertaintyProfile.from_instance(build_pigou(0.3, 1.5))
    assert profile.r_max == 1.5
    assert profile.gamma == pytest.approx(1 / 1.5)
    assert set(profile.per_edge) == {"e1", "e2"}


def test_profile_ignores_types_without_demand():
    profile = UncertaintyProfile.from_instance(build_pigou(1.0, 3.0))
    assert profile.r_values == (3.0, 3.0)
    assert profile.gamma == 1.0
    assert poa_bound_linear(profile.r_max, profile.gamma) == pytest.approx(4 / 3)


def test_profile_of_instance_without_demand():
    instance = build_pigou(0.5, 2.0).with_demands({"theta1": 0.0, "theta2": 0.0})
    assert UncertaintyProfile.from_instance(instance).r_max == 2.0


def test_edge_dependent_bound_takes_worst_edge():
    profile = UncertaintyProfile((1.0, 1.5, 1.0, 1.0), {"e1": (1.0, 1.5), "e2": (1.0, 1.0)})
    assert poa_bound_edge_dependent(profile) == pytest.approx(poa_bound_linear(1.5, 1 / 1.5))


def test_edge_dependent_bound_names_edge():
    profile = UncertaintyProfile((1.0, 3.0), {"e7": (1.0, 3.0)})
    with pytest.raises(BoundUndefined, match="e7"):
        poa_bound_edge_dependent(profile)


def test_empty_profile():
    with pytest.raises(ValueError):
        UncertaintyProfile(())
