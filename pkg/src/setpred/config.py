"""INI configuration for the pipeline.

Dotted keys from the documentation map to [section] key, e.g. service.host
lives under [service] as host. Command-line flags override config values.
"""

from __future__ import annotations

import configparser
import hashlib
from pathlib import Path
from typing import Optional


class ConfigError(Exception):
    pass


_MISSING = object()

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


class Config:
    def __init__(self, parser: configparser.ConfigParser, path: Optional[Path] = None):
        self._parser = parser
        self.path = path

    @classmethod
    def empty(cls) -> "Config":
        return cls(configparser.ConfigParser())

    def get(self, section: str, key: str, fallback=_MISSING) -> str:
        try:
            return self._parser.get(section, key)
        except (configparser.NoSectionError, configparser.NoOptionError):
            if fallback is _MISSING:
                raise ConfigError(f"missing config key {section}.{key}") from None
            return fallback

    def get_int(self, section: str, key: str, fallback=_MISSING) -> int:
        raw = self.get(section, key, fallback)
        if raw is fallback and not isinstance(raw, str):
            return raw
        try:
            return int(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"config key {section}.{key} must be an integer, "
                              f"got {raw!r}") from None

    def get_bool(self, section: str, key: str, fallback=_MISSING) -> bool:
        raw = self.get(section, key, fallback)
        if not isinstance(raw, str):
            return raw
        low = raw.strip().lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ConfigError(f"config key {section}.{key} must be a boolean, got {raw!r}")

    def digest(self) -> str:
        items = []
        for section in sorted(self._parser.sections()):
            for key, value in sorted(self._parser.items(section)):
                items.append(f"{section}.{key}={value}")
        return hashlib.sha256("\n".join(items).encode("utf-8")).hexdigest()


def load_config(path) -> Config:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"unreadable config {path}: {e}") from None
    return Config(parser, path)
