# Licensed under the MIT License.

"""Tipping-point grids over per-arm delta shifts."""

import json
import logging
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator

from mdalab.analysis.fit import AnalysisSpec, fit_analysis
from mdalab.analysis.pooling import PooledResult, rubin_pool, significance_band
from mdalab.controlled.mechanism import MechanismSpec, complete_all
from mdalab.data.dataset import Dataset
from mdalab.engine.spec import VisitDesign
from mdalab.engine.state import ParameterDraw
from mdalab.utils.parallel import map_tasks
from mdalab.utils.status import ConfigurationError

logger = logging.getLogger(__name__)

GRID_COLUMNS = ["delta_0", "delta_1", "estimate", "total_variance", "t", "df", "p", "significance"]


class TippingSpec(BaseModel):
    delta_0: list[float] = Field(default_factory=lambda: [0.0])
    delta_1: list[float] = Field(default_factory=lambda: [0.0])

    @field_validator("delta_0", "delta_1")
    @classmethod
    def _finite(cls, value):
        if not all(np.isfinite(v) for v in value):
            raise ValueError("grid values must be finite")
        return sorted(value)


@dataclass
class TippingCell:
    delta_0: float
    delta_1: float
    pooled: PooledResult
    coefficient: str

    def row(self) -> dict:
        summary = self.pooled.row(self.coefficient)
        return {
            "delta_0": self.delta_0,
            "delta_1": self.delta_1,
            "estimate": summary["estimate"],
            "total_variance": summary["total"],
            "t": summary["t"],
            "df": summary["df"],
            "p": summary["p"],
            "significance": significance_band(summary["p"]),
        }


@dataclass
class TippingGrid:
    delta_0: list[float]
    delta_1: list[float]
    cells: list[TippingCell] = field(default_factory=list)

    def cell(self, delta_0: float, delta_1: float) -> TippingCell:
        for cell in self.cells:
            if cell.delta_0 == delta_0 and cell.delta_1 == delta_1:
                return cell
        raise KeyError((delta_0, delta_1))

    def p_values(self) -> np.ndarray:
        """p-values as a (len(delta_0), len(delta_1)) array."""
        return np.array([[self.cell(a, b).pooled.row(self.cells[0].coefficient)["p"] for b in self.delta_1] for a in self.delta_0])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([cell.row() for cell in self.cells], columns=GRID_COLUMNS)

    def to_csv(self, path) -> Path:
        path = Path(path)
        self.to_frame().to_csv(path, index=False)
        return path

    def to_json(self, path) -> Path:
        path = Path(path)
        rows = [cell.row() for cell in self.cells]
        for row in rows:
            row.update({k: None for k, v in row.items() if isinstance(v, float) and not np.isfinite(v)})
        coefficient = self.cells[0].coefficient if self.cells else None
        with open(path, "w") as f:
            json.dump({"coefficient": coefficient, "cells": rows}, f, indent=2)
        return path


def analyze_completed(
    dataset: Dataset, completed: list[np.ndarray], analysis: AnalysisSpec, restore: np.ndarray | None = None
) -> PooledResult:
    """Fit the analysis model to each completed matrix and pool.

    ``restore`` puts rows back in input order so results match an analysis of the
    written imputation files.
    """
    frames = [dataset.to_frame(y) for y in completed]
    if restore is not None:
        frames = [frame.iloc[restore].reset_index(drop=True) for frame in frames]
    fits = [fit_analysis(frame, analysis) for frame in frames]
    return rubin_pool([f.estimates for f in fits], [f.variances for f in fits], fits[0].names)


def _evaluate_cell(cell, draws, dataset, designs, analysis, seed, restore):
    delta_0, delta_1 = cell
    mechanism = MechanismSpec.collapsed(delta_0, delta_1)
    completed = complete_all(draws, dataset, designs, mechanism, seed)
    return analyze_completed(dataset, completed, analysis, restore)


def tipping_point_grid(
    draws: list[ParameterDraw],
    dataset: Dataset,
    designs: list[VisitDesign],
    tipping: TippingSpec,
    analysis: AnalysisSpec,
    seed: int,
    workers: int | None = 1,
    restore: np.ndarray | None = None,
) -> TippingGrid:
    """Impute, analyze and pool for every (delta_0, delta_1) pair.

    One set of parameter draws serves the whole grid. Each cell re-derives the same
    dropout streams from ``seed``, so the (0, 0) cell reproduces the MAR analysis
    exactly.
    """
    if not tipping.delta_0 or not tipping.delta_1:
        raise ConfigurationError("tipping grid needs at least one value per arm", field="tipping")
    if not draws:
        raise ConfigurationError("tipping grid needs at least one imputation", field="mcmc.draws")
    cells = [(a, b) for a in tipping.delta_0 for b in tipping.delta_1]
    logger.info("Evaluating %d tipping cells over %d imputations", len(cells), len(draws))
    func = partial(_evaluate_cell, draws=draws, dataset=dataset, designs=designs, analysis=analysis, seed=seed, restore=restore)
    pooled = map_tasks(func, cells, workers)
    grid = TippingGrid(list(tipping.delta_0), list(tipping.delta_1))
    for (a, b), result in zip(cells, pooled):
        grid.cells.append(TippingCell(a, b, result, analysis.target))
    return grid
