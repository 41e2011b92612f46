"""Settings management with hierarchical loading.

Settings are read from:
1. Local .mixphase.conf in the current directory
2. User config in the platform-specific config directory
3. Built-in defaults if neither exists
"""

import configparser
from dataclasses import fields
from pathlib import Path
from typing import Any, Dict, List, Optional

from mixphase.qstate.linalg import NumericPolicy
from mixphase.utils.errors import ConfigError
from mixphase.utils.platform import get_default_workers, get_user_config_dir

LOCAL_CONFIG_NAME = ".mixphase.conf"
USER_CONFIG_NAME = "config"

NUMERIC_SECTION = "numeric"
RUN_SECTION = "run"


class Config:
    """
    Settings manager with hierarchical loading.

    Loads settings from:
    1. Local .mixphase.conf in current directory (highest priority)
    2. User config directory (platform-specific)

    With neither file present every lookup falls back to its default.
    """

    def __init__(self, local_path: Optional[Path] = None, user_path: Optional[Path] = None):
        """
        Initialize settings manager.

        Args:
            local_path: Path to local settings file (default: ./.mixphase.conf)
            user_path: Path to user settings file (default: platform-specific)
        """
        self._parser = configparser.ConfigParser()
        self._local_path = local_path or Path.cwd() / LOCAL_CONFIG_NAME
        self._user_path = user_path or get_user_config_dir() / USER_CONFIG_NAME
        self._active_config_path: Optional[Path] = None

        self._load()

    def _load(self) -> None:
        """
        Load settings from hierarchical sources.

        Raises:
            ConfigError: If a settings file exists but cannot be parsed
        """
        for path in (self._local_path, self._user_path):
            if path.exists():
                try:
                    self._parser.read(path)
                except configparser.Error as e:
                    raise ConfigError(f"Cannot parse settings file {path}: {e}")
                self._active_config_path = path
                return

    def get(self, section: str, key: str, fallback: Optional[str] = None) -> Optional[str]:
        """
        Get a settings value.

        Args:
            section: Settings section
            key: Settings key
            fallback: Fallback value if not found

        Returns:
            str | None: Settings value or fallback
        """
        return self._parser.get(section, key, fallback=fallback)

    def get_bool(self, section: str, key: str, fallback: bool = False) -> bool:
        """
        Get a boolean settings value.

        Raises:
            ConfigError: If the stored value is not a boolean
        """
        try:
            return self._parser.getboolean(section, key, fallback=fallback)
        except ValueError as e:
            raise ConfigError(f"Setting {section}.{key} is not a boolean: {e}")

    def get_int(self, section: str, key: str, fallback: int = 0) -> int:
        """
        Get an integer settings value.

        Raises:
            ConfigError: If the stored value is not an integer
        """
        try:
            return self._parser.getint(section, key, fallback=fallback)
        except ValueError as e:
            raise ConfigError(f"Setting {section}.{key} is not an integer: {e}")

    def get_float(self, section: str, key: str, fallback: float = 0.0) -> float:
        """
        Get a float settings value.

        Raises:
            ConfigError: If the stored value is not a number
        """
        try:
            return self._parser.getfloat(section, key, fallback=fallback)
        except ValueError as e:
            raise ConfigError(f"Setting {section}.{key} is not a number: {e}")

    def set(self, section: str, key: str, value: Any) -> None:
        """
        Set a settings value.

        Args:
            section: Settings section
            key: Settings key
            value: Value to set
        """
        if not self._parser.has_section(section):
            self._parser.add_section(section)

        self._parser.set(section, key, str(value))

    def save(self, target: Optional[str] = None) -> None:
        """
        Save settings to file.

        Args:
            target: Target location ('local' or 'user'). If None, saves to the
                active file, or the local path when no file was loaded.

        Raises:
            ConfigError: If target is invalid or the file cannot be written
        """
        if target == "local":
            save_path = self._local_path
        elif target == "user":
            save_path = self._user_path
        elif target is None:
            save_path = self._active_config_path or self._local_path
        else:
            raise ConfigError(f"Invalid target '{target}'. Use 'local' or 'user'")

        save_path.parent.mkdir(parents=True, exist_ok=True)

        try:
            with open(save_path, "w") as f:
                self._parser.write(f)
        except OSError as e:
            raise ConfigError(f"Failed to save settings to {save_path}: {e}")
        self._active_config_path = save_path

    def get_sections(self) -> List[str]:
        return self._parser.sections()

    def get_all(self, section: str) -> Dict[str, str]:
        """
        Get all key-value pairs in a section.

        Args:
            section: Settings section

        Returns:
            Dict[str, str]: Dictionary of all keys and values in section
        """
        if not self._parser.has_section(section):
            return {}

        return dict(self._parser.items(section))

    def numeric_policy(self) -> NumericPolicy:
        """
        NumericPolicy with the ``[numeric]`` section applied over the defaults.

        Raises:
            ConfigError: On an unknown key or a value of the wrong type
        """
        defaults = NumericPolicy()
        overrides: Dict[str, Any] = {}
        known = {f.name for f in fields(NumericPolicy)}
        for key in self.get_all(NUMERIC_SECTION):
            if key not in known:
                raise ConfigError(
                    f"Unknown setting {NUMERIC_SECTION}.{key}; choose from {sorted(known)}"
                )
            if isinstance(getattr(defaults, key), int):
                overrides[key] = self.get_int(NUMERIC_SECTION, key)
            else:
                overrides[key] = self.get_float(NUMERIC_SECTION, key)
        return defaults.with_overrides(overrides)

    def workers(self) -> int:
        workers = self.get_int(RUN_SECTION, "workers", fallback=get_default_workers())
        if workers < 1:
            raise ConfigError(f"Setting {RUN_SECTION}.workers must be positive, got {workers}")
        return workers

    def output_dir(self) -> Path:
        return Path(self.get(RUN_SECTION, "output_dir", fallback="results"))

    def timestamp(self) -> bool:
        """Whether summaries carry the wall-clock time; off makes every output byte-stable."""
        return self.get_bool(RUN_SECTION, "timestamp", fallback=True)

    @property
    def config_path(self) -> Optional[Path]:
        """
        Get the active settings file path.

        Returns:
            Path | None: Path to active settings file, None when running on defaults
        """
        return self._active_config_path

    def __repr__(self) -> str:
        return f"Config(active={self._active_config_path})"
