"""Suite manager for cqbl."""

import logging
from typing import Any, Dict, List, Optional, Sequence, Type

from ..config.settings import Settings
from .base_suite import SuiteInfo, SuiteResult, VerificationSuite
from .builtin_suites import BuiltinSuites


class SuiteManager:
    """Registers verification suites and runs them by name."""

    def __init__(self, settings: Optional[Settings] = None):
        self.logger = logging.getLogger(__name__)
        self.settings = settings or Settings()
        self.suites: Dict[str, VerificationSuite] = {}
        self.suite_classes: Dict[str, Type[VerificationSuite]] = {}

        self._load_builtin_suites()

    def _load_builtin_suites(self):
        try:
            suite_classes = BuiltinSuites().get_suite_classes()
            for suite_name, suite_class in suite_classes.items():
                self.register_suite_class(suite_name.lower(), suite_class)
            self.logger.debug(f"Discovered {len(suite_classes)} built-in suites")
        except Exception as e:
            self.logger.error(f"Failed to load built-in suites: {e}")

    def register_suite_class(self, name: str, suite_class: Type[VerificationSuite]):
        """Register a suite class.

        Args:
            name: Suite name
            suite_class: Suite class
        """
        self.suite_classes[name.lower()] = suite_class

    def instantiate_suite(self, name: str) -> Optional[VerificationSuite]:
        key = name.lower()
        if key not in self.suite_classes:
            self.logger.error(f"Suite class not found: {name}")
            return None
        try:
            suite = self.suite_classes[key](self.settings)
            self.suites[key] = suite
            return suite
        except Exception as e:
            self.logger.error(f"Failed to instantiate suite {name}: {e}")
            return None

    def get_suite(self, name: str) -> Optional[VerificationSuite]:
        """Get a suite instance by name, instantiating it on first use.

        Args:
            name: Suite name

        Returns:
            Suite instance or None if not registered
        """
        key = name.lower()
        if key in self.suites:
            return self.suites[key]
        if key in self.suite_classes:
            return self.instantiate_suite(key)
        return None

    def get_suite_names(self) -> List[str]:
        return list(self.suite_classes.keys())

    def get_all_suite_info(self) -> Dict[str, SuiteInfo]:
        info = {}
        for name in self.suite_classes:
            suite = self.get_suite(name)
            if suite:
                info[name] = suite.get_info()
        return info

    def search_suites(self, query: str) -> List[str]:
        """Names of suites whose name, description, keywords or category match the query."""
        return [name for name in self.suite_classes if (suite := self.get_suite(name)) and suite.matches_search(query)]

    def get_categories(self) -> List[str]:
        return sorted({info.category for info in self.get_all_suite_info().values()})

    def get_suites_by_category(self, category: str) -> List[str]:
        return [name for name, info in self.get_all_suite_info().items() if info.category == category]

    def enable_suite(self, name: str) -> bool:
        suite = self.get_suite(name)
        if suite:
            suite.set_enabled(True)
            return True
        return False

    def disable_suite(self, name: str) -> bool:
        suite = self.get_suite(name)
        if suite:
            suite.set_enabled(False)
            return True
        return False

    def run_suite(self, name: str, trials: int = 100, seed: Optional[int] = None) -> SuiteResult:
        """Run a suite by name.

        Args:
            name: Suite name
            trials: Number of random instances
            seed: Seed for the run; defaults to the configured runtime seed

        Returns:
            SuiteResult; failures inside the suite become an error result
        """
        suite = self.get_suite(name)
        if not suite:
            return SuiteResult(success=False, error=f"Suite not found: {name}")
        if not suite.is_enabled():
            return SuiteResult(success=False, error=f"Suite is disabled: {name}")

        seed = self.settings.runtime.seed if seed is None else seed
        self.logger.info(f"Running suite {name} with {trials} trials, seed {seed}")
        try:
            return suite.run(trials, seed)
        except Exception as e:
            self.logger.error(f"Error running suite {name}: {e}")
            return SuiteResult(success=False, error=f"Suite execution error: {e}")

    def run_all(self, names: Optional[Sequence[str]] = None, trials: int = 100, seed: Optional[int] = None) -> Dict[str, Any]:
        """Run several suites and collect a JSON-ready summary.

        Args:
            names: Suites to run; all registered suites when omitted
            trials: Number of random instances per suite
            seed: Seed shared by every suite of the run

        Returns:
            Dictionary with per-suite results and an overall success flag
        """
        names = list(names) if names else self.get_suite_names()
        results = {name: self.run_suite(name, trials, seed) for name in names}
        return {
            "seed": self.settings.runtime.seed if seed is None else seed,
            "trials": trials,
            "success": all(r.success for r in results.values()),
            "suites": {name: r.to_dict() for name, r in results.items()},
        }
