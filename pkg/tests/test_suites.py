"""Tests for the suite manager and the built-in verification suites."""

import pytest

from cqbl.config import Settings
from cqbl.suites import BuiltinSuites, SuiteInfo, SuiteManager

SUITES = ["alt", "rhc", "dpi", "fano", "region", "converse"]


@pytest.fixture
def manager():
    settings = Settings()
    settings.runtime.threads = 1
    return SuiteManager(settings)


def test_builtin_names(manager):
    assert BuiltinSuites().get_suite_names() == SUITES
    assert manager.get_suite_names() == SUITES
    assert manager.get_suite("ALT") is manager.get_suite("alt")
    assert manager.get_suite("nope") is None


def test_suite_info(manager):
    info = manager.get_all_suite_info()
    assert set(info) == set(SUITES)
    assert all(isinstance(i, SuiteInfo) and i.claim for i in info.values())


def test_suite_info_defaults():
    info = SuiteInfo(name="x", description="y")
    assert info.category == "General"
    assert info.keywords == []


@pytest.mark.parametrize("query, expected", [
    ("hypercontractivity", ["rhc"]),
    ("Lieb", ["alt"]),
    ("converse audits", ["fano", "converse"]),
    ("no such thing", []),
])
def test_search_suites(manager, query, expected):
    assert manager.search_suites(query) == expected


def test_categories(manager):
    categories = manager.get_categories()
    assert categories == sorted(categories)
    assert "Converse audits" in categories
    assert manager.get_suites_by_category("Converse audits") == ["fano", "converse"]


def test_unknown_suite(manager):
    result = manager.run_suite("nope", trials=1, seed=0)
    assert not result.success
    assert "Suite not found" in result.error


def test_disabled_suite(manager):
    assert manager.disable_suite("alt")
    result = manager.run_suite("alt", trials=1, seed=0)
    assert not result.success
    assert "disabled" in result.error
    assert manager.enable_suite("alt")
    assert manager.run_suite("alt", trials=1, seed=0).success
    assert not manager.disable_suite("nope")


def test_alt_suite(manager):
    result = manager.run_suite("alt", trials=5, seed=0)
    assert result.success, result.violations
    assert result.checked == 6
    assert result.data == {"random": 5, "commuting": 1}


def test_rhc_suite(manager):
    result = manager.run_suite("rhc", trials=4, seed=1)
    assert result.success, result.violations
    assert result.data["below_threshold_rejected"] == 4


def test_dpi_suite(manager):
    result = manager.run_suite("dpi", trials=3, seed=2)
    assert result.success, result.violations
    assert result.checked == 4 + 3 * 3


def test_suite_is_reproducible(manager):
    first = manager.run_suite("alt", trials=3, seed=7).to_dict()
    second = manager.run_suite("alt", trials=3, seed=7).to_dict()
    assert first == second


def test_run_all_summary(manager):
    summary = manager.run_all(["alt", "rhc"], trials=2, seed=3)
    assert summary["seed"] == 3
    assert summary["trials"] == 2
    assert summary["success"]
    assert set(summary["suites"]) == {"alt", "rhc"}
    assert set(summary["suites"]["alt"]) == {"success", "message", "data", "error", "violations", "checked"}


def test_run_all_fails_on_unknown(manager):
    summary = manager.run_all(["alt", "nope"], trials=1, seed=0)
    assert not summary["success"]


@pytest.mark.slow
@pytest.mark.parametrize("name", ["fano", "region", "converse"])
def test_slow_suites(manager, name):
    result = manager.run_suite(name, trials=2, seed=0)
    assert result.success, result.violations or result.error
