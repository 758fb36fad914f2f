import pytest

from selfroute.core.equilibrium.config import SolverConfig
from selfroute.core.model.cost import CostFunction
from selfroute.core.model.instance import Edge, GameInstance, UserType
from selfroute.core.scenarios.named import build_braess, build_fig3, build_pigou


@pytest.fixture
def solver_config():
    return SolverConfig()


@pytest.fixture
def pigou():
    return build_pigou()


@pytest.fixture
def fig3():
    return build_fig3()


@pytest.fixture
def braess():
    return build_braess()


@pytest.fixture
def two_link():
    """Two parallel links x + 1 and 2x, one certain type of demand 1."""
    edges = [
        Edge("e1", "s", "t", CostFunction(1.0, 1.0)),
        Edge("e2", "s", "t", CostFunction(2.0, 0.0)),
    ]
    return GameInstance.build(["s", "t"], edges, [UserType("theta1", "s", "t", 1.0)])


@pytest.fixture
def series_parallel():
    """Two parallel pairs in series: s-i over e1/e2, i-t over e3/e4."""
    edges = [
        Edge("e1", "s", "i", CostFunction(1.0, 0.0)),
        Edge("e2", "s", "i", CostFunction(0.5, 1.0)),
        Edge("e3", "i", "t", CostFunction(2.0, 0.0)),
        Edge("e4", "i", "t", CostFunction(1.0, 0.5)),
    ]
    types = [
        UserType("theta1", "s", "t", 0.6, 1.0),
        UserType("theta2", "s", "t", 0.4, 1.5),
    ]
    return GameInstance.build(["s", "i", "t"], edges, types)


SAMPLE_DOCUMENT = """
{
  "nodes": ["s", "t"],
  "edges": [
    {"id": "e1", "tail": "s", "head": "t", "a": "1/4", "b": 2.5},
    {"id": "e2", "tail": "s", "head": "t", "a": 1}
  ],
  "types": [
    {"id": "theta1", "source": "s", "sink": "t", "demand": "4/5"},
    {"id": "theta2", "source": "s", "sink": "t", "demand": 0.2, "r": 3}
  ]
}
"""


@pytest.fixture
def sample_document():
    return SAMPLE_DOCUMENT


@pytest.fixture
def instance_file(tmp_path):
    path = tmp_path / "pigou.json"
    path.write_text(SAMPLE_DOCUMENT)
    return path
