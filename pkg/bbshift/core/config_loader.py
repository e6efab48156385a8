"""
BBShift Config Loader

This module handles loading configuration data from environment variables,
.env files, and config files (YAML).
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

try:
    from dotenv import load_dotenv
    DOTENV_AVAILABLE = True
except ImportError:
    DOTENV_AVAILABLE = False

logger = logging.getLogger(__name__)

ENV_PREFIX = "BBSHIFT_"


class ConfigLoader:
    """
    Loads and manages configuration from multiple sources.

    Hierarchy of config sources (highest priority first):
    1. Environment variables (``BBSHIFT_<SECTION>_<KEY>``)
    2. .env file
    3. ``system_config.yaml``
    4. Default values passed by the caller
    """

    def __init__(self, config_dir: Optional[Path] = None):
        """
        Initialize the config loader.

        Args:
            config_dir: Directory holding the YAML files (default: the bundled ``bbshift/config``)
        """
        self.config_dir = Path(config_dir) if config_dir else Path(__file__).parent.parent / "config"
        self.env_loaded = False
        self._system: Optional[Dict[str, Any]] = None

        self._load_env()

    def _load_env(self) -> None:
        """Load environment variables from a .env file in the working directory."""
        if not DOTENV_AVAILABLE:
            logger.debug("python-dotenv not installed, skipping .env file loading")
            return

        env_path = Path.cwd() / ".env"
        if env_path.exists():
            load_dotenv(dotenv_path=str(env_path), override=False)
            self.env_loaded = True
            logger.debug(f"Loaded environment variables from {env_path}")

    def load_yaml_config(self, filename: str) -> Dict[str, Any]:
        """
        Load configuration from a YAML file.

        Args:
            filename: Name of the YAML file in the config directory

        Returns:
            Configuration dictionary (empty if the file is missing or invalid)
        """
        config_path = self.config_dir / filename

        if not config_path.exists():
            logger.warning(f"Config file not found: {config_path}")
            return {}

        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                config = yaml.safe_load(f)
            logger.debug(f"Loaded configuration from {config_path}")
            return config or {}
        except yaml.YAMLError as e:
            logger.error(f"Error loading config file {config_path}: {str(e)}")
            return {}

    @property
    def system(self) -> Dict[str, Any]:
        """The parsed ``system_config.yaml``, loaded on first use."""
        if self._system is None:
            self._system = self.load_yaml_config("system_config.yaml")
        return self._system

    def get_env(self, key: str, default: Any = None) -> Any:
        """
        Get value from environment variables.

        Args:
            key: Environment variable name
            default: Default value if not found

        Returns:
            Value of environment variable or default
        """
        return os.environ.get(key, default)

    def get_bool_env(self, key: str, default: bool = False) -> bool:
        """
        Get boolean value from environment variables.

        Args:
            key: Environment variable name
            default: Default value if not found

        Returns:
            Boolean value of environment variable or default
        """
        value = self.get_env(key, None)
        if value is None:
            return default

        return value.lower() in ("true", "yes", "1", "t", "y")

    def get(self, dotted_key: str, default: Any = None) -> Any:
        """
        Look up a setting such as ``detection.alpha``.

        An environment variable ``BBSHIFT_DETECTION_ALPHA`` overrides the YAML
        value; its text is parsed as a YAML scalar so numbers and booleans keep
        their types.

        Args:
            dotted_key: Section and key joined by dots
            default: Value returned when the setting is absent

        Returns:
            The configured value or default
        """
        env_key = ENV_PREFIX + dotted_key.replace(".", "_").upper()
        raw = self.get_env(env_key)
        if raw is not None:
            try:
                return yaml.safe_load(raw)
            except yaml.YAMLError:
                return raw

        node: Any = self.system
        for part in dotted_key.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node


# Create a global instance
config_loader = ConfigLoader()
