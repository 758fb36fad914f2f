from selfroute.core.topology.independence import (
    SLIDecomposition,
    decompose_sli,
    is_linearly_independent,
)
from selfroute.core.topology.network import TwoTerminalNetwork
from selfroute.core.topology.report import TopologyReport, check_containment, classify
from selfroute.core.topology.series_parallel import is_series_parallel

__all__ = [
    "SLIDecomposition",
    "TopologyReport",
    "TwoTerminalNetwork",
    "check_containment",
    "classify",
    "decompose_sli",
    "is_linearly_independent",
    "is_series_parallel",
]
