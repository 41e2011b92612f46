"""Platform-specific helper functions."""

import os
from pathlib import Path

from platformdirs import user_config_dir


def get_user_config_dir() -> Path:
    """
    Get the platform-specific user configuration directory.

    Returns:
        Path: User config directory
            - macOS: ~/Library/Application Support/mixphase
            - Linux: ~/.config/mixphase
            - Windows: %APPDATA%/mixphase
    """
    return Path(user_config_dir("mixphase", appauthor=False))


def get_default_workers() -> int:
    """
    Get the default size of the sweep worker pool.

    Returns:
        int: Number of usable CPUs, at least 1
    """
    return max(1, os.cpu_count() or 1)
