import logging
from dataclasses import dataclass, field
from typing import Union

from selfroute.core.constants import DEFAULT_PATH_CAP
from selfroute.core.topology.independence import decompose_sli, is_linearly_independent
from selfroute.core.topology.network import TwoTerminalNetwork
from selfroute.core.topology.series_parallel import is_series_parallel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TopologyReport:
    """
    Verdicts for the three nested classes LI => SLI => SP.

    sli_decomposition lists the independent blocks in series order and is
    empty unless the network is SLI. witness explains each negative verdict.
    """

    is_series_parallel: bool
    is_linearly_independent: bool
    is_sli: bool
    sli_decomposition: tuple = ()
    cut_vertices: tuple = ()
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "sp": self.is_series_parallel,
            "li": self.is_linearly_independent,
            "sli": self.is_sli,
            "blocks": [block.to_json() for block in self.sli_decomposition],
            "cut_vertices": list(self.cut_vertices),
            "witness": self.witness,
        }


def classify(network: TwoTerminalNetwork, cap: int = DEFAULT_PATH_CAP) -> TopologyReport:
    """
    Classify a two-terminal network.

    Raises:
        PathExplosion: If path enumeration for the independence tests exceeds cap
    """
    sp = is_series_parallel(network, cap)
    li = is_linearly_independent(network, cap)
    sli = decompose_sli(network, cap)

    witness = {}
    if not sp:
        witness["wheatstone"] = sp.witness.to_json() if sp.witness is not None else None
    if not li:
        witness["shared_path"] = list(li.witness)
    if not sli:
        witness["failing_block"] = sli.failing_block.to_json()

    report = TopologyReport(
        is_series_parallel=sp.is_series_parallel,
        is_linearly_independent=li.is_linearly_independent,
        is_sli=sli.is_sli,
        sli_decomposition=sli.blocks if sli.is_sli else (),
        cut_vertices=sli.cut_vertices,
        witness=witness,
    )
    logger.info(
        f"Topology {network.source}->{network.sink} ({len(network.edges)} edges): "
        f"sp={report.is_series_parallel} li={report.is_linearly_independent} sli={report.is_sli}"
    )
    return report


def check_containment(subject: Union[TwoTerminalNetwork, TopologyReport]) -> bool:
    """True when LI => SLI => SP holds for the network's verdicts."""
    report = subject if isinstance(subject, TopologyReport) else classify(subject)
    if report.is_linearly_independent and not report.is_sli:
        logger.error("Containment violated: linearly independent network is not SLI")
        return False
    if report.is_sli and not report.is_series_parallel:
        logger.error("Containment violated: SLI network is not series-parallel")
        return False
    return True
