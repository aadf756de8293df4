# Licensed under the MIT License.

"""Orchestrator that runs one command end to end and records its manifest."""

import json
import logging
import os
from pathlib import Path

import numpy as np
import pandas as pd

from mdalab.analysis.fit import AnalysisSpec, fit_analysis
from mdalab.analysis.pooling import PooledResult, rubin_pool
from mdalab.analysis.scenarios import TRUE_PARAMETERS, simulate_full_scenario
from mdalab.controlled.mechanism import MechanismKind, generate_imputations
from mdalab.controlled.tipping import TippingGrid, tipping_point_grid
from mdalab.data.dataset import Dataset, load_dataset, save_dataset
from mdalab.data.missingness import sort_monotone
from mdalab.engine.runner import run_chains
from mdalab.engine.spec import resolve_model
from mdalab.engine.state import ParameterDraw
from mdalab.fcs.pipeline import fcs_draws
from mdalab.run_config import EngineKind, OutputFormat, RunConfig
from mdalab.session import RunSession
from mdalab.utils.critical_section import DeferredInterrupt
from mdalab.utils.status import ConfigurationError, DataError, RunPrint

logger = logging.getLogger(__name__)

IMPUTATION_GLOB = "imp_*.csv"


def imputation_name(k: int) -> str:
    return f"imp_{k + 1:04d}.csv"


class Orchestrator:
    def __init__(self, workers: int | None = None, out_dir=None):
        self.workers = workers
        self.out_dir = Path(out_dir) if out_dir else None
        self.session = None
        self.rprint = RunPrint()
        self.use_wandb = os.getenv("USE_WANDB", "false").lower() == "true"

    def _start(self, command: str, out_dir: Path, cfg: RunConfig | None = None, manifest: str = "manifest.json") -> RunSession:
        out_dir.mkdir(parents=True, exist_ok=True)
        self.session = RunSession(command, results_dir=out_dir, manifest_name=manifest)
        if cfg is not None:
            self.session.set_config(cfg)
        self.session.start()
        return self.session

    def _finish(self) -> Path:
        self.session.end()
        path = self.session.to_json()
        if self.use_wandb:
            self.session.to_wandb()
        return path

    def _workers(self, cfg: RunConfig) -> int | None:
        return self.workers if self.workers is not None else cfg.workers

    def simulate(self, scenario: int, n: int, seed: int, mechanism: str = "mar") -> Path:
        """Write a simulated dataset, its complete values and a truth manifest."""
        out_dir = self.out_dir or Path(".")
        session = self._start("simulate", out_dir)
        session.seed = seed
        dataset, full = simulate_full_scenario(scenario, n, seed, mechanism)
        complete = Dataset(dataset.schema, dataset.ids, dataset.x, full, np.ones(full.shape, dtype=bool))
        truth = {
            "scenario": scenario,
            "n": n,
            "seed": seed,
            "mechanism": MechanismKind(mechanism).value,
            "schema": dataset.schema.model_dump(mode="json"),
            "parameters": TRUE_PARAMETERS,
            "full_data": "full.csv",
        }
        with DeferredInterrupt():
            data_path = save_dataset(dataset, out_dir / "data.csv")
            full_path = save_dataset(complete, out_dir / "full.csv")
            truth_path = out_dir / "truth.json"
            with open(truth_path, "w") as f:
                json.dump(truth, f, indent=4)
        for path in (data_path, full_path, truth_path):
            session.add_output(path)
        self.rprint.step(f"Simulated scenario {scenario} with {n} subjects into {out_dir}")
        self._finish()
        return data_path

    def _load(self, cfg: RunConfig) -> tuple[Dataset, np.ndarray]:
        if cfg.dataset is None:
            raise ConfigurationError("a dataset section is required", field="dataset")
        dataset = load_dataset(cfg.dataset.path, cfg.dataset.columns)
        order = np.argsort(-dataset.s, kind="stable")
        sorted_dataset, n_counts = sort_monotone(dataset)
        logger.info("Loaded %d subjects; subjects reaching each visit: %s", dataset.n, n_counts.tolist())
        return sorted_dataset, np.argsort(order, kind="stable")

    def _draws(self, cfg: RunConfig, dataset: Dataset) -> list[ParameterDraw]:
        workers = self._workers(cfg)
        if cfg.engine == EngineKind.FCS:
            return fcs_draws(dataset, cfg.fcs, cfg.model, cfg.mcmc.draws, cfg.seed, workers)
        result = run_chains(dataset, cfg.model, cfg.mcmc, workers)
        self.session.set_diagnostics(result.diagnostics)
        return result.draws

    def impute(self, cfg: RunConfig) -> list[Path]:
        """Run the configured engine and write one CSV per imputation."""
        out_dir = self.out_dir or cfg.out_dir
        session = self._start("impute", out_dir, cfg)
        dataset, restore = self._load(cfg)
        self.rprint.step(f"Imputing with {cfg.engine.value} under {cfg.mechanism.kind.value}")
        draws = self._draws(cfg, dataset)
        designs = resolve_model(dataset, cfg.model)
        frames = generate_imputations(draws, dataset, designs, cfg.mechanism, cfg.seed, self._workers(cfg), restore)
        token = cfg.dataset.columns.missing_token
        paths = []
        with DeferredInterrupt():
            for k, frame in enumerate(frames):
                path = out_dir / imputation_name(k)
                frame.to_csv(path, index=False, na_rep=token)
                paths.append(path)
            if cfg.output.concatenate:
                stacked = pd.concat([f.assign(imputation=k + 1) for k, f in enumerate(frames)], ignore_index=True)
                stacked = stacked[["imputation"] + list(frames[0].columns)]
                concatenated = out_dir / "imputations.csv"
                stacked.to_csv(concatenated, index=False, na_rep=token)
                paths.append(concatenated)
        for path in paths:
            session.add_output(path)
        self._finish()
        return paths

    def analyze(self, imputation_dir, analysis: AnalysisSpec, fmt: OutputFormat = OutputFormat.CSV) -> PooledResult:
        """Fit ``analysis`` to every imputation file in a directory and pool."""
        imputation_dir = Path(imputation_dir)
        if not imputation_dir.is_dir():
            raise FileNotFoundError(f"imputation directory {imputation_dir} does not exist")
        files = sorted(imputation_dir.glob(IMPUTATION_GLOB))
        if not files:
            raise DataError(f"no {IMPUTATION_GLOB} files in {imputation_dir}")
        out_dir = self.out_dir or imputation_dir
        session = self._start("analyze", out_dir, manifest="analysis_manifest.json")
        fits = [fit_analysis(pd.read_csv(path, float_precision="round_trip"), analysis) for path in files]
        pooled = rubin_pool([f.estimates for f in fits], [f.variances for f in fits], fits[0].names)
        if not pooled.between_defined:
            self.rprint.warning("single imputation: between-imputation variance is undefined")
        with DeferredInterrupt():
            if fmt == OutputFormat.JSON:
                path = pooled.to_json(out_dir / "pooled.json")
            else:
                path = pooled.to_csv(out_dir / "pooled.csv")
        session.add_output(path)
        session.set_results(pooled.row(analysis.target))
        self.rprint.result(pooled.to_frame().to_string(index=False))
        self._finish()
        return pooled

    def tipping(self, cfg: RunConfig) -> TippingGrid:
        """Tipping-point grid over the configured per-arm shifts."""
        if cfg.tipping is None or not cfg.tipping.delta_0 or not cfg.tipping.delta_1:
            raise ConfigurationError("tipping needs non-empty delta_0 and delta_1 lists", field="tipping")
        if cfg.analysis is None:
            raise ConfigurationError("tipping needs an analysis section", field="analysis")
        out_dir = self.out_dir or cfg.out_dir
        session = self._start("tipping", out_dir, cfg)
        dataset, restore = self._load(cfg)
        draws = self._draws(cfg, dataset)
        designs = resolve_model(dataset, cfg.model)
        grid = tipping_point_grid(
            draws, dataset, designs, cfg.tipping, cfg.analysis, cfg.seed, self._workers(cfg), restore
        )
        with DeferredInterrupt():
            if cfg.output.format == OutputFormat.JSON:
                path = grid.to_json(out_dir / "tipping.json")
            else:
                path = grid.to_csv(out_dir / "tipping.csv")
        session.add_output(path)
        self.rprint.result(grid.to_frame().to_string(index=False))
        self._finish()
        return grid
