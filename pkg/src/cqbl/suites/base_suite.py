"""Base class for cqbl verification suites."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from ..config.settings import Settings
from ..core.serialization import encode_matrix
from ..quantum.operators import HermitianOperator


@dataclass
class SuiteInfo:
    """Information about a suite."""
    name: str
    description: str
    category: str = "General"
    keywords: List[str] = None
    claim: str = ""

    def __post_init__(self):
        if self.keywords is None:
            self.keywords = []


@dataclass
class SuiteResult:
    """Result of a suite run."""
    success: bool
    message: str = ""
    data: Optional[Any] = None
    error: Optional[str] = None
    violations: List[Dict[str, Any]] = field(default_factory=list)
    checked: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "success": self.success,
            "message": self.message,
            "data": self.data,
            "error": self.error,
            "violations": self.violations,
            "checked": self.checked,
        }


def replay_operator(op: HermitianOperator) -> List:
    """Serialized operator for violation records."""
    return encode_matrix(op.entries)


class VerificationSuite(ABC):
    """Base class for randomized or exhaustive property suites."""

    def __init__(self, settings: Optional[Settings] = None):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.settings = settings or Settings()
        self._info = self.get_suite_info()
        self._enabled = True

    @abstractmethod
    def get_suite_info(self) -> SuiteInfo:
        """Get information about this suite.

        Returns:
            SuiteInfo object with suite details
        """

    @abstractmethod
    def run(self, trials: int, seed: int) -> SuiteResult:
        """Run the suite.

        Args:
            trials: Number of random instances (suites with exhaustive parts may ignore it)
            seed: Seed for every random draw of the run

        Returns:
            SuiteResult with the checked count and serialized violations
        """

    def is_enabled(self) -> bool:
        return self._enabled

    def set_enabled(self, enabled: bool):
        self._enabled = enabled
        self.logger.info(f"Suite {self._info.name} {'enabled' if enabled else 'disabled'}")

    def get_info(self) -> SuiteInfo:
        return self._info

    def matches_search(self, query: str) -> bool:
        """Check if the suite matches a search query.

        Args:
            query: Search query string

        Returns:
            True if name, description, keywords or category contain the query
        """
        query_lower = query.lower()
        if query_lower in self._info.name.lower():
            return True
        if query_lower in self._info.description.lower():
            return True
        if any(query_lower in keyword.lower() for keyword in self._info.keywords):
            return True
        return query_lower in self._info.category.lower()

    def finish(self, checked: int, violations: List[Dict[str, Any]], data: Optional[Dict] = None) -> SuiteResult:
        """Build the result, logging the outcome once."""
        success = not violations
        message = f"{self._info.name}: {checked} checks, {len(violations)} violations"
        if success:
            self.logger.info(message)
        else:
            self.logger.error(message)
        return SuiteResult(success=success, message=message, data=data, violations=violations, checked=checked)

    @staticmethod
    def rounded(value: float, digits: int = 12) -> float:
        """Floats for summaries; fixed precision keeps seeded summaries byte-stable."""
        return float(f"{value:.{digits}g}")
