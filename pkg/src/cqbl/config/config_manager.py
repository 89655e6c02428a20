"""Configuration management for cqbl."""

import json
import os
import shutil
from datetime import datetime
from pathlib import Path
from typing import Any, Optional
import logging

from ..core.errors import PreconditionError
from .settings import Settings

THREADS_ENV = "CQBL_THREADS"
TRUE_WORDS = ("true", "1", "yes", "on")
FALSE_WORDS = ("false", "0", "no", "off")


def coerce_value(raw: str, default: Any, name: str) -> Any:
    """Parse command-line text into the type of a setting's default value."""
    if isinstance(default, bool):
        lowered = raw.strip().lower()
        if lowered in TRUE_WORDS:
            return True
        if lowered in FALSE_WORDS:
            return False
        raise PreconditionError(f"{name} expects true or false, got {raw!r}")
    try:
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError as e:
        raise PreconditionError(f"{name} expects {type(default).__name__}, got {raw!r}") from e
    return raw


class ConfigManager:
    """Manages persisted settings and environment overrides.

    ``persisted`` mirrors ``settings.json``; ``settings`` is what a run uses,
    i.e. the persisted values with environment overrides on top. Only the
    persisted values are ever written back.
    """

    def __init__(self, config_dir: Optional[str] = None):
        """Initialize the configuration manager.

        Args:
            config_dir: Custom configuration directory path
        """
        self.logger = logging.getLogger(__name__)

        if config_dir:
            self.config_dir = Path(config_dir)
        else:
            # XDG Base Directory Specification
            xdg_config_home = os.environ.get("XDG_CONFIG_HOME")
            if xdg_config_home:
                self.config_dir = Path(xdg_config_home) / "cqbl"
            else:
                self.config_dir = Path.home() / ".config" / "cqbl"

        self.config_file = self.config_dir / "settings.json"
        self.persisted = Settings()
        self.settings = Settings()
        self.env_threads = self._read_env_threads()

        try:
            self.config_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            self.logger.warning(f"Cannot create config directory {self.config_dir}: {e}")

        self.load_settings()

    def load_settings(self) -> Settings:
        """Load settings from the configuration file.

        Returns:
            Effective settings (persisted values plus environment overrides)
        """
        try:
            if self.config_file.exists():
                with open(self.config_file, 'r') as f:
                    self.persisted = Settings.from_dict(json.load(f))
                self.logger.info(f"Settings loaded from {self.config_file}")
            else:
                self.logger.info("No config file found, using defaults")
                self.persisted = Settings()
                self.save_settings()
        except Exception as e:
            self.logger.error(f"Failed to load settings: {e}")
            self.persisted = Settings()

        self._refresh()
        return self.settings

    def save_settings(self) -> bool:
        """Write the persisted settings to the configuration file.

        Returns:
            True if saved successfully, False otherwise
        """
        try:
            with open(self.config_file, 'w') as f:
                json.dump(self.persisted.to_dict(), f, indent=2)
            self.logger.info(f"Settings saved to {self.config_file}")
            return True
        except Exception as e:
            self.logger.error(f"Failed to save settings: {e}")
            return False

    def get_settings(self) -> Settings:
        return self.settings

    def update_settings(self, **sections) -> bool:
        """Update persisted settings section by section.

        Args:
            **sections: Section name to a dict of field overrides

        Returns:
            True if updated and saved successfully; False for unknown sections
        """
        data = self.persisted.to_dict()
        for section, values in sections.items():
            if section not in data or not isinstance(values, dict):
                self.logger.error(f"Unknown settings section {section!r}")
                return False
            data[section].update(values)

        self.persisted = Settings.from_dict(data)
        self._refresh()
        return self.save_settings()

    def set_value(self, dotted_name: str, raw: str) -> bool:
        """Persist one ``section.field`` given as command-line text.

        Raises:
            PreconditionError: for unknown names or text of the wrong type
        """
        section, _, name = dotted_name.partition(".")
        defaults = Settings().to_dict()
        if section not in defaults or name not in defaults[section]:
            raise PreconditionError(f"Unknown setting {dotted_name!r}")
        value = coerce_value(raw, defaults[section][name], dotted_name)
        return self.update_settings(**{section: {name: value}})

    def reset_to_defaults(self, backup: bool = True) -> bool:
        """Reset persisted settings to their defaults, backing up the old file first.

        Returns:
            True if reset successfully
        """
        if backup and self.config_file.exists():
            self.backup_config()
        self.persisted = Settings()
        self._refresh()
        return self.save_settings()

    def get_config_path(self) -> Path:
        return self.config_dir

    def _read_env_threads(self) -> Optional[int]:
        raw = os.getenv(THREADS_ENV, "")
        if not raw:
            return None
        try:
            threads = int(raw)
        except ValueError:
            self.logger.warning(f"Ignoring non-integer {THREADS_ENV}={raw!r}")
            return None
        if threads < 0:
            self.logger.warning(f"Ignoring negative {THREADS_ENV}={threads}")
            return None
        return threads

    def _refresh(self):
        self.settings = Settings.from_dict(self.persisted.to_dict())
        if self.env_threads is not None:
            self.settings.runtime.threads = self.env_threads
            self.logger.debug(f"Worker count set to {self.env_threads} from {THREADS_ENV}")

    def backup_config(self) -> Optional[Path]:
        """Create a timestamped copy of the configuration file.

        Returns:
            Path of the backup, or None if there was nothing to back up
        """
        try:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            backup_file = self.config_dir / f"settings_backup_{timestamp}.json"

            if self.config_file.exists():
                shutil.copy2(self.config_file, backup_file)
                self.logger.info(f"Config backup created: {backup_file}")
                return backup_file
            else:
                self.logger.warning("No config file to backup")
                return None
        except Exception as e:
            self.logger.error(f"Failed to create backup: {e}")
            return None
