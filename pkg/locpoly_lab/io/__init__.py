"""I/O utilities (configuration, settings lookup and atomic file output)."""

from .files import atomic_write_text
from .settings import (
    DEFAULT_SETTINGS_PATH,
    find_project_root,
    load_settings,
    load_yaml,
    resolve_path,
    settings_value,
)

__all__ = [
    "DEFAULT_SETTINGS_PATH",
    "atomic_write_text",
    "find_project_root",
    "load_settings",
    "load_yaml",
    "resolve_path",
    "settings_value",
]
