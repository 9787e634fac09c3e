#!/usr/bin/env python3
"""
Configuration Manager for distgraph-lab
Handles YAML settings and JSON run configs.
"""

import copy
import json
import yaml
from pathlib import Path
from typing import Dict, Any, Optional
import logging

from packaging.version import Version, InvalidVersion

from graphs.common import DistGraphError

logger = logging.getLogger(__name__)


class ConfigManager:
    """Manages the settings file and --config run configs"""

    DEFAULT_CONFIG_DIR = Path.home() / ".config" / "distgraph_lab"
    DEFAULT_CONFIG_FILE = DEFAULT_CONFIG_DIR / "config.yaml"

    def __init__(self, settings_path: Optional[str] = None):
        """Initialize config manager with optional custom settings path"""
        self.config_path = Path(settings_path).expanduser() if settings_path else self.DEFAULT_CONFIG_FILE
        self.config_dir = self.config_path.parent

    def load_config(self) -> Dict[str, Any]:
        """Load settings, creating the default file if needed; missing keys fall back to defaults"""
        try:
            if not self.config_path.exists():
                logger.info(f"Settings file not found at {self.config_path}, creating default")
                self._create_default_config()

            with open(self.config_path, 'r', encoding='utf-8') as f:
                config = yaml.safe_load(f)

            logger.debug(f"Loaded settings from {self.config_path}")
            return self._merge(self._get_default_config(), config or {})

        except Exception as e:
            logger.warning(f"Failed to load settings from {self.config_path}: {e}")
            logger.info("Using default settings")
            return self._get_default_config()

    def save_config(self, config: Dict[str, Any]) -> None:
        """Save settings to file"""
        try:
            self.config_dir.mkdir(parents=True, exist_ok=True)

            with open(self.config_path, 'w', encoding='utf-8') as f:
                yaml.dump(config, f, default_flow_style=False, allow_unicode=True)

            logger.info(f"Saved settings to {self.config_path}")

        except Exception as e:
            logger.error(f"Failed to save settings to {self.config_path}: {e}")
            raise

    def _create_default_config(self) -> None:
        self.save_config(self._get_default_config())

    @staticmethod
    def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
        merged = copy.deepcopy(base)
        for key, value in overrides.items():
            if isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key] = ConfigManager._merge(merged[key], value)
            else:
                merged[key] = value
        return merged

    def _get_default_config(self) -> Dict[str, Any]:
        """Get default settings dictionary"""
        return {
            'graph': {
                'max_vertices': 3_000_000,
                'neighbor_cache_max_n': 16,
                'neighbor_sets_max_entries': 5_000_000,
            },
            'sampling': {
                'dense_p_threshold': 0.05,
                'dense_max_n': 8,
            },
            'ext': {
                'f_exponent': 0.6,
                'max_tuples': 10_000_000,
                'sampled_tuples': 2000,
                'rejection_factor': 50,
            },
            'tilde': {
                'exact_max_tuples': 1_000_000,
                'samples': 20_000,
            },
            'experiments': {
                'min_sweep_trials': 50,
                'min_poisson_trials': 1000,
                'grid_low': 0.1,
                'grid_high': 10.0,
                'grid_points': 9,
            },
            'pathology': {
                'budget': 200_000,
            },
            'runtime': {
                'threads': 0,
            },
            'output': {
                'format': 'csv',
            },
        }

    def get_nested_value(self, config: Dict[str, Any], key_path: str, default: Any = None) -> Any:
        """Get nested configuration value using dot notation (e.g., 'ext.f_exponent')"""
        keys = key_path.split('.')
        value = config

        try:
            for key in keys:
                value = value[key]
            return value
        except (KeyError, TypeError):
            return default

    def update_config(self, updates: Dict[str, Any]) -> None:
        """Update settings with new values (nested sections are merged)"""
        config = self.load_config()
        self.save_config(self._merge(config, updates))

    def load_run_config(self, path: str, running_version: Optional[str] = None) -> Dict[str, Any]:
        """
        Read a --config JSON file

        Accepts a bare object of CLI keys or a complete JSON result document,
        in which case its "config" member (and master_seed) are used.

        Raises:
            DistGraphError: If the file cannot be read or is not a JSON object
        """
        try:
            with open(Path(path).expanduser(), 'r', encoding='utf-8') as f:
                document = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise DistGraphError(f"cannot read run config {path}: {e}", "parse")

        if not isinstance(document, dict):
            raise DistGraphError(f"run config {path} must be a JSON object", "parse")

        if "library_version" in document:
            self._check_version(str(document["library_version"]), running_version)

        if isinstance(document.get("config"), dict):
            options = dict(document["config"])
            if "master_seed" in document and "seed" not in options:
                options["seed"] = document["master_seed"]
        else:
            options = {k: v for k, v in document.items() if k != "library_version"}

        logger.debug(f"Loaded run config from {path}: {sorted(options)}")
        return options

    @staticmethod
    def _check_version(recorded: str, running_version: Optional[str]) -> None:
        if running_version is None:
            from rdg import VERSION
            running_version = VERSION
        try:
            if Version(recorded).major != Version(running_version).major:
                logger.warning(f"Run config was written by version {recorded}; running {running_version}")
        except InvalidVersion:
            logger.warning(f"Run config has an unparsable library_version {recorded!r}")
