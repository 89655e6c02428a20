"""Configuration management for cqbl."""

from .config_manager import ConfigManager
from .settings import (
    AuditSettings,
    ConverseSettings,
    OptimizerSettings,
    RegionSettings,
    RuntimeSettings,
    Settings,
)

__all__ = [
    "ConfigManager",
    "Settings",
    "OptimizerSettings",
    "RegionSettings",
    "ConverseSettings",
    "AuditSettings",
    "RuntimeSettings",
]
