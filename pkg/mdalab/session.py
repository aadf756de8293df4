# Licensed under the MIT License.

"""Run session: what ran, with which configuration, and what it wrote."""

import json
import time
import uuid
from pathlib import Path

import wandb

from mdalab import __version__
from mdalab.paths import RESULTS_DIR
from mdalab.run_config import RunConfig, config_hash


class RunSession:
    def __init__(self, command: str, results_dir=None, manifest_name: str = "manifest.json") -> None:
        self.session_id = uuid.uuid4()
        self.command = command
        self.config: dict = {}
        self.config_hash = None
        self.seed = None
        self.engine = None
        self.diagnostics: dict = {}
        self.outputs: list[str] = []
        self.results: dict = {}
        self.start_time = None
        self.end_time = None
        self.results_dir = Path(results_dir) if results_dir else RESULTS_DIR
        self.manifest_name = manifest_name

    def set_config(self, cfg: RunConfig):
        """Record the validated configuration and its hash.

        Args:
            cfg (RunConfig): The configuration the run uses.
        """
        self.config = cfg.model_dump(mode="json")
        self.config_hash = config_hash(cfg)
        self.seed = cfg.seed
        self.engine = cfg.engine.value

    def set_diagnostics(self, diagnostics: dict):
        self.diagnostics = diagnostics

    def set_results(self, results: dict):
        self.results = results

    def add_output(self, path):
        self.outputs.append(str(path))

    def start(self):
        self.start_time = time.time()

    def end(self):
        self.end_time = time.time()

    def get_duration(self) -> float:
        return self.end_time - self.start_time

    def to_dict(self):
        return {
            "session_id": str(self.session_id),
            "command": self.command,
            "version": __version__,
            "seed": self.seed,
            "engine": self.engine,
            "config_hash": self.config_hash,
            "config": self.config,
            "start_time": self.start_time,
            "end_time": self.end_time,
            "diagnostics": self.diagnostics,
            "results": self.results,
            "outputs": self.outputs,
        }

    def to_json(self) -> Path:
        """Save the manifest in the results directory."""
        self.results_dir.mkdir(parents=True, exist_ok=True)
        path = self.results_dir / self.manifest_name
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=4, default=str)
        return path

    def to_wandb(self):
        """Log the manifest to Weights & Biases."""
        wandb.log(self.to_dict())

    @staticmethod
    def from_json(path) -> dict:
        with open(path, "r") as f:
            return json.load(f)
