"""Seeded verification harness: cases, runners, report files and the CLI."""

from .cases import (CASE_KINDS, InequalityCase, Instance, RunConfig, generate_instance,
                    instance_seed, run_instance, scale_instance)
from .runner import SuiteSummary, default_suite, emit_report, named_suites, run_case, run_suite

__all__ = [
    "CASE_KINDS", "InequalityCase", "Instance", "RunConfig", "generate_instance", "instance_seed",
    "run_instance", "scale_instance", "SuiteSummary", "default_suite", "emit_report",
    "named_suites", "run_case", "run_suite",
]
