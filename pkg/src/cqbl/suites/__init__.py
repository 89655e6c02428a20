"""Randomized and exhaustive verification suites for cqbl."""

from .base_suite import SuiteInfo, SuiteResult, VerificationSuite
from .builtin_suites import BuiltinSuites
from .suite_manager import SuiteManager

__all__ = ["SuiteManager", "VerificationSuite", "BuiltinSuites", "SuiteInfo", "SuiteResult"]
