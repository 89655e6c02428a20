"""Tests for settings persistence, worker helpers and matrix serialization."""

import json

import numpy as np
import pytest

from cqbl.config import ConfigManager, Settings
from cqbl.config.config_manager import THREADS_ENV
from cqbl.core.errors import PreconditionError, SpecParseError
from cqbl.core.serialization import decode_matrix, decode_rect_matrix, encode_matrix
from cqbl.core.workers import WorkerPool, resolve_threads, spawn_generators


@pytest.fixture
def manager(tmp_path, monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    return ConfigManager(str(tmp_path))


def test_settings_roundtrip():
    settings = Settings()
    settings.optimizer.restarts = 7
    settings.region.quantum_u = True
    settings.runtime.seed = 99
    restored = Settings.from_dict(settings.to_dict())
    assert restored == settings


def test_settings_from_dict_ignores_unknown_keys():
    settings = Settings.from_dict({
        "region": {"grid_resolution": 16, "no_such_field": 1},
        "plugins": {"anything": True},
    })
    assert settings.region.grid_resolution == 16
    assert settings.region.ternary_grid_resolution == Settings().region.ternary_grid_resolution
    assert settings.audit == Settings().audit


def test_manager_writes_defaults(manager, tmp_path):
    config_file = tmp_path / "settings.json"
    assert config_file.exists()
    with open(config_file) as f:
        assert json.load(f) == Settings().to_dict()
    assert manager.get_config_path() == tmp_path


def test_update_settings_persists(manager, tmp_path):
    assert manager.update_settings(converse={"mu_points": 11}, runtime={"seed": 5})
    reloaded = ConfigManager(str(tmp_path)).get_settings()
    assert reloaded.converse.mu_points == 11
    assert reloaded.runtime.seed == 5
    assert reloaded.converse.mu_max == Settings().converse.mu_max


def test_reset_to_defaults(manager, tmp_path):
    manager.update_settings(audit={"table_limit": 10})
    assert manager.reset_to_defaults()
    assert ConfigManager(str(tmp_path)).get_settings() == Settings()


def test_backup_config(manager, tmp_path):
    assert manager.backup_config()
    backups = list(tmp_path.glob("settings_backup_*.json"))
    assert len(backups) == 1


def test_corrupt_config_falls_back_to_defaults(tmp_path, monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    (tmp_path / "settings.json").write_text("{not json")
    assert ConfigManager(str(tmp_path)).get_settings() == Settings()


def test_threads_environment_override(tmp_path, monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    manager = ConfigManager(str(tmp_path))
    assert manager.get_settings().runtime.threads == 3
    with open(tmp_path / "settings.json") as f:
        assert json.load(f)["runtime"]["threads"] == 0


def test_threads_environment_not_written_by_update_or_reset(tmp_path, monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    manager = ConfigManager(str(tmp_path))
    assert manager.update_settings(runtime={"seed": 5})
    assert manager.get_settings().runtime.threads == 3
    with open(tmp_path / "settings.json") as f:
        saved = json.load(f)
    assert saved["runtime"]["threads"] == 0
    assert saved["runtime"]["seed"] == 5
    assert manager.reset_to_defaults()
    assert manager.get_settings().runtime.threads == 3
    assert manager.persisted == Settings()


def test_reset_backs_up_first(manager, tmp_path):
    manager.update_settings(audit={"table_limit": 10})
    assert manager.reset_to_defaults()
    backups = list(tmp_path.glob("settings_backup_*.json"))
    assert len(backups) == 1
    assert json.loads(backups[0].read_text())["audit"]["table_limit"] == 10


@pytest.mark.parametrize("name, raw, expected", [
    ("converse.mu_points", "11", 11),
    ("converse.mu_max", "2.5", 2.5),
    ("region.quantum_u", "yes", True),
    ("runtime.log_level", "DEBUG", "DEBUG"),
])
def test_set_value_coerces_to_field_type(manager, tmp_path, name, raw, expected):
    assert manager.set_value(name, raw)
    section, field_name = name.split(".")
    saved = json.loads((tmp_path / "settings.json").read_text())
    assert saved[section][field_name] == expected
    assert getattr(getattr(manager.get_settings(), section), field_name) == expected


@pytest.mark.parametrize("name, raw", [
    ("converse.no_such_field", "1"),
    ("plugins.anything", "1"),
    ("converse.mu_points", "eleven"),
    ("region.quantum_u", "maybe"),
])
def test_set_value_rejects(manager, name, raw):
    with pytest.raises(PreconditionError):
        manager.set_value(name, raw)
    assert manager.persisted == Settings()


def test_update_settings_rejects_unknown_section(manager):
    assert not manager.update_settings(plugins={"anything": True})


@pytest.mark.parametrize("raw", ["many", "-2"])
def test_invalid_threads_environment_ignored(tmp_path, monkeypatch, raw):
    monkeypatch.setenv(THREADS_ENV, raw)
    assert ConfigManager(str(tmp_path)).get_settings().runtime.threads == 0


def test_resolve_threads():
    assert resolve_threads(4) == 4
    assert resolve_threads(0) >= 1


def test_spawn_generators_reproducible():
    first = [g.random() for g in spawn_generators(11, 3)]
    second = [g.random() for g in spawn_generators(11, 3)]
    assert first == second
    assert len(set(first)) == 3


@pytest.mark.parametrize("threads", [1, 4])
def test_map_ordered_keeps_order(threads):
    assert WorkerPool(threads).map_ordered(lambda x: x * x, range(20)) == [x * x for x in range(20)]


def test_encode_decode_matrix():
    m = np.array([[1.0, 0.5j], [-0.5j, 0.0]])
    np.testing.assert_allclose(decode_matrix(encode_matrix(m)), m)


@pytest.mark.parametrize("data", [
    [[1, 0], [0, 1]],
    [[[1, 0], [0, 0], [0, 0]]],
    [[["a", 0]]],
    [[[float("nan"), 0]]],
])
def test_decode_matrix_rejects(data):
    with pytest.raises(SpecParseError):
        decode_matrix(data)


def test_decode_rect_matrix_allows_rectangles():
    k = decode_rect_matrix([[[1, 0], [0, 0]]])
    assert k.shape == (1, 2)
    with pytest.raises(SpecParseError):
        decode_rect_matrix([[1, 0]])
