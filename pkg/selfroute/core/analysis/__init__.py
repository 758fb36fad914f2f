from selfroute.core.analysis.bounds import (
    UncertaintyProfile,
    poa_bound_edge_dependent,
    poa_bound_linear,
    poa_bound_polynomial,
)
from selfroute.core.analysis.checks import (
    CheckResult,
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
)
from selfroute.core.analysis.random_instances import InstanceProfile, generate_random_instance
from selfroute.core.analysis.report import AnalysisReport, analyze
from selfroute.core.analysis.suites import SUITES, Suite, SuiteConfig, SuiteReport, run_suite

__all__ = [
    "SUITES",
    "AnalysisReport",
    "CheckResult",
    "InstanceProfile",
    "Suite",
    "SuiteConfig",
    "SuiteReport",
    "UncertaintyProfile",
    "analyze",
    "check_cor1",
    "check_lemma1",
    "check_lemma2",
    "check_lemma3",
    "check_lemma5",
    "check_poa_bound",
    "check_thm1",
    "check_thm3",
    "check_thm4",
    "empirical_poa",
    "generate_random_instance",
    "poa_bound_edge_dependent",
    "poa_bound_linear",
    "poa_bound_polynomial",
    "run_suite",
]
