"""
Configuration management for ulamlab
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional

DEFAULTS: Dict[str, Any] = {
    'threads': 1,
    'factorial_cache': 10_000,
    'exact_max_cells': 8_000,
    'perm_max_n': 9,
    'walk_max_length': 10,
    'series_max_degree': 14,
    'contour_min_nodes': 64,
    'contour_max_nodes': 65_536,
    'contour_tol': 1e-12,
    'mc_max_n': 40,
    'mc_max_k': 8,
    'mc_node_cap': 10_000_000,
    'partition_max_cells': 10_000,
    'log_level': 'WARNING',
}

ENV_PREFIX = 'ULAMLAB_'


def _coerce(raw: str, like: Any) -> Any:
    if isinstance(like, bool):
        return raw.strip().lower() in ('1', 'true', 'yes', 'on')
    if isinstance(like, int):
        return int(float(raw))
    if isinstance(like, float):
        return float(raw)
    return raw.strip()


class Config:
    def __init__(self, path: Optional[Path] = None):
        env_path = os.getenv(ENV_PREFIX + 'CONFIG')
        if path is None:
            path = Path(env_path) if env_path else Path.home() / '.ulamlab' / 'config'
        self.config_file = Path(path)
        self._config = self._load_config()

    def _load_config(self) -> dict:
        """Load key = value pairs from the config file"""
        values: Dict[str, Any] = {}
        if not self.config_file.exists():
            return values
        try:
            text = self.config_file.read_text()
        except OSError:
            return values
        for line in text.splitlines():
            line = line.split('#', 1)[0].strip()
            if not line or '=' not in line:
                continue
            key, raw = line.split('=', 1)
            key = key.strip()
            values[key] = _coerce(raw, DEFAULTS.get(key, ''))
        return values

    def _save_config(self):
        """Save configuration to file"""
        try:
            self.config_file.parent.mkdir(parents=True, exist_ok=True)
            lines = [f"{k} = {v}" for k, v in sorted(self._config.items())]
            self.config_file.write_text("\n".join(lines) + "\n")
        except OSError as e:
            print(f"Warning: Could not save config: {e}")

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value, environment first, then file, then defaults"""
        env_key = ENV_PREFIX + key.upper().replace('.', '_')
        like = DEFAULTS.get(key, default if default is not None else '')
        env_value = os.getenv(env_key)
        if env_value is not None:
            return _coerce(env_value, like)

        if key in self._config:
            return self._config[key]
        if default is not None:
            return default
        return DEFAULTS.get(key)

    def set(self, key: str, value: Any):
        """Set configuration value and persist it"""
        if isinstance(value, str):
            value = _coerce(value, DEFAULTS.get(key, ''))
        self._config[key] = value
        self._save_config()

    def get_all(self) -> dict:
        """Get the merged configuration"""
        merged = {key: self.get(key) for key in DEFAULTS}
        for key, value in self._config.items():
            merged.setdefault(key, value)
        return merged


_default_config: Optional[Config] = None


def get_config() -> Config:
    """Process-wide configuration used by core modules when none is passed"""
    global _default_config
    if _default_config is None:
        _default_config = Config()
    return _default_config


def set_config(config: Optional[Config]):
    global _default_config
    _default_config = config
