"""
BBShift Config package

This module contains the bundled configuration files: system defaults in
system_config.yaml and named experiment presets in experiments.yaml.
"""

from pathlib import Path
from typing import Any, Dict, List

import yaml

from bbshift.core.exceptions import ConfigError

# Get the package directory
_package_dir = Path(__file__).parent


def _load(filename: str) -> Dict[str, Any]:
    config_path = _package_dir / filename

    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    with open(config_path, 'r', encoding='utf-8') as f:
        config = yaml.safe_load(f)

    return config or {}


def load_system_config() -> Dict[str, Any]:
    """
    Load system configuration from system_config.yaml

    Returns:
        Dictionary containing system configuration
    """
    return _load("system_config.yaml")


def list_presets() -> List[str]:
    """Names of the experiment presets, in file order."""
    return list(_load("experiments.yaml").get("experiments", {}))


def load_experiment_preset(name: str) -> Dict[str, Any]:
    """
    Load one experiment preset from experiments.yaml

    Args:
        name: Preset name

    Returns:
        Dictionary accepted by ExperimentConfig

    Raises:
        ConfigError: No preset with that name
    """
    presets = _load("experiments.yaml").get("experiments", {})
    if name not in presets:
        raise ConfigError(f"Unknown experiment preset '{name}'; available: {', '.join(presets)}")
    return presets[name]
