"""Convergence studies, reference comparison and the verification suite."""

from .reference import compare_reference, load_reference
from .study import ConvergenceReport, StudyConfig, observed_rates, space_study, time_study
from .verify import Verdict, verify_suite

__all__ = [
    "ConvergenceReport",
    "StudyConfig",
    "Verdict",
    "compare_reference",
    "load_reference",
    "observed_rates",
    "space_study",
    "time_study",
    "verify_suite",
]
