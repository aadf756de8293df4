# Licensed under the MIT License.

"""Abstracts the configuration files for mdalab."""

import os
from pathlib import Path

import yaml
from dotenv import load_dotenv


class Config:
    def __init__(self, config_path):
        self.config_path = Path(config_path)
        self.config = self._load_config()

    def _load_config(self):
        with open(self.config_path, "r") as file:
            return yaml.safe_load(file) or {}

    def get(self, key, default=None):
        return self.config.get(key, default)

    def section(self, key) -> dict:
        """Return a nested mapping, or an empty dict if the key is absent."""
        value = self.config.get(key)
        return dict(value) if isinstance(value, dict) else {}


def read_document(path) -> dict:
    """Read a JSON or YAML run document into a plain dict.

    JSON is a subset of YAML, so one loader serves both formats.
    """
    with open(path, "r", encoding="utf-8") as file:
        document = yaml.safe_load(file)
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ValueError(f"{path}: top-level document must be a mapping")
    return document


def env_overrides() -> dict:
    """Collect the environment overrides honoured by run configs.

    Only the seed and the output directory may be overridden this way.
    """
    load_dotenv()
    overrides = {}
    seed = os.getenv("MDALAB_SEED")
    if seed:
        overrides["seed"] = int(seed)
    out = os.getenv("MDALAB_OUT")
    if out:
        overrides["out"] = out
    return overrides
