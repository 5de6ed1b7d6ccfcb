"""
ConfigManager - Loads, merges and validates scenario configuration and presets
"""
import copy
import json
import logging
import os

from src.errors import ConfigError
from src.link.scenario import Scenario

logger = logging.getLogger(__name__)

DATA_DIRECTORY = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")
DEFAULT_CONFIG_PATH = os.path.join(DATA_DIRECTORY, "config.json")
PRESET_DIRECTORY = os.path.join(DATA_DIRECTORY, "presets")


def merge_settings(base, overrides):
    """
    Deep-merge overrides into a copy of base. Objects merge key by key;
    lists and scalars replace.
    """
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_settings(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    cal = overrides.get("calibration")
    if isinstance(cal, dict) and isinstance(merged.get("calibration"), dict):
        # the two calibration modes exclude each other
        if cal.get("sir_db") is not None and "a_sig_v" not in cal:
            merged["calibration"]["a_sig_v"] = None
        if cal.get("a_sig_v") is not None and "sir_db" not in cal:
            merged["calibration"]["sir_db"] = None
    return merged


class ConfigManager:
    """
    Manages the layered scenario configuration: built-in defaults, the
    defaults file, a preset or user file, then command-line overrides.
    """

    def __init__(self):
        """Initialize the ConfigManager with the built-in defaults"""
        self.settings = Scenario().to_dict()
        self.configFilePath = ""
        self.presetDirectory = PRESET_DIRECTORY

    def initialize(self, filePath=DEFAULT_CONFIG_PATH, presetDirectory=PRESET_DIRECTORY):
        """
        Initialize the configuration manager

        Args:
            filePath (str): Path to the defaults file
            presetDirectory (str): Directory holding NAME.json presets
        """
        self.configFilePath = filePath
        self.presetDirectory = presetDirectory
        self.loadConfiguration()

    def _readJson(self, path, key):
        try:
            with open(path, "r") as f:
                loaded = json.load(f)
        except FileNotFoundError as err:
            raise ConfigError(key, f"no such file: {path}") from err
        except json.JSONDecodeError as err:
            raise ConfigError(key, f"{path} is not valid JSON: {err}") from err
        if not isinstance(loaded, dict):
            raise ConfigError(key, f"{path} must hold a JSON object")
        return loaded

    def loadConfiguration(self):
        """
        Merge the defaults file into the settings, creating it if missing

        Returns:
            bool: True if a file was loaded, False if a default one was created
        """
        if os.path.exists(self.configFilePath):
            self.settings = merge_settings(self.settings, self._readJson(self.configFilePath, "config"))
            logger.debug("loaded defaults from %s", self.configFilePath)
            return True
        self.saveConfiguration()
        return False

    def saveConfiguration(self, path=None):
        """
        Save the effective configuration

        Args:
            path (str, optional): Destination, the defaults file when omitted

        Returns:
            str: The path written
        """
        path = path or self.configFilePath
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w") as f:
            json.dump(self.effectiveConfiguration(), f, indent=4)
            f.write("\n")
        return path

    def getSetting(self, key):
        """
        Get a setting value by dotted key (e.g. "noise.seed")

        Returns:
            object: The setting value or None if key not found
        """
        node = self.settings
        for part in key.split("."):
            if not isinstance(node, dict) or part not in node:
                return None
            node = node[part]
        return node

    def setSetting(self, key, value):
        """
        Set a setting value by dotted key

        Args:
            key (str): Dotted key path
            value (object): The value to set
        """
        parts = key.split(".")
        node = self.settings
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(key, f"{part} is not a section")
        node[parts[-1]] = value
        return True

    def mergeSettings(self, overrides):
        self.settings = merge_settings(self.settings, overrides)

    def listPresets(self):
        if not os.path.isdir(self.presetDirectory):
            return []
        return sorted(os.path.splitext(name)[0] for name in os.listdir(self.presetDirectory)
                      if name.endswith(".json"))

    def loadPreset(self, name):
        """
        Merge a named preset over the current settings

        Args:
            name (str): Preset name, e.g. "fig8k"
        """
        path = os.path.join(self.presetDirectory, f"{name}.json")
        if not os.path.exists(path):
            raise ConfigError("preset", f"unknown preset {name!r}, available: {', '.join(self.listPresets())}")
        self.mergeSettings(self._readJson(path, "preset"))
        logger.info("loaded preset %s", name)

    def loadScenarioFile(self, path):
        """Merge a user scenario file over the current settings"""
        self.mergeSettings(self._readJson(path, "config"))
        logger.info("loaded scenario %s", path)

    def buildScenario(self):
        """
        Validate the settings into a Scenario

        Returns:
            Scenario: The validated scenario

        Raises:
            ConfigError: naming the offending key
        """
        return Scenario.from_dict(self.settings)

    def effectiveConfiguration(self):
        """Fully defaulted configuration of the current settings."""
        return self.buildScenario().to_dict()
