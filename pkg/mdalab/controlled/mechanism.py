# Licensed under the MIT License.

"""Imputation of post-dropout cells under MAR and pattern-mixture mechanisms.

Every mechanism acts on the linear predictor of the sequential visit models:

- ``mar`` keeps eta = z'beta;
- ``copy_reference`` recomputes eta with the treatment indicator set to 0, which
  also zeroes every interaction that involves it;
- ``delta`` adds a shift to eta. The scale is the family's linear predictor: the
  mean for Normal and skew visits, the log-odds of category 1 for logistic, the
  cumulative log-odds for proportional odds, every baseline-category log-odds for
  nominal visits and the log-mean for counts.
"""

import logging
from enum import Enum
from functools import partial

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator, model_validator

from mdalab.data.dataset import Dataset
from mdalab.engine.spec import VisitDesign
from mdalab.engine.state import ParameterDraw
from mdalab.samplers.rng import PURPOSE_DROPOUT, RngStream
from mdalab.utils.parallel import map_tasks
from mdalab.utils.status import ConfigurationError

logger = logging.getLogger(__name__)

ARMS = (0, 1)


class MechanismKind(str, Enum):
    MAR = "mar"
    COPY_REFERENCE = "copy_reference"
    DELTA = "delta"


class DeltaShift(BaseModel):
    """One entry of the shift table; unset ``visit`` or ``pattern`` match any."""

    arm: int
    delta: float = Field(allow_inf_nan=False)
    visit: str | None = None
    pattern: int | None = Field(default=None, ge=0)

    @field_validator("arm")
    @classmethod
    def _arm(cls, value):
        if value not in ARMS:
            raise ValueError("arm must be 0 or 1")
        return value

    @property
    def specificity(self) -> int:
        return (self.visit is not None) + (self.pattern is not None)

    def matches(self, arm: int, visit: str, pattern: int) -> bool:
        return (
            self.arm == arm
            and (self.visit is None or self.visit == visit)
            and (self.pattern is None or self.pattern == pattern)
        )


class MechanismSpec(BaseModel):
    """Dropout-imputation rule.

    ``delta`` is the per-arm shift used for every visit after dropout. ``shifts``
    refines it by visit and dropout pattern; the most specific matching entry wins.
    """

    kind: MechanismKind = MechanismKind.MAR
    delta: dict[int, float] = Field(default_factory=dict)
    shifts: list[DeltaShift] = Field(default_factory=list)

    @field_validator("delta")
    @classmethod
    def _finite(cls, value):
        for arm, shift in value.items():
            if arm not in ARMS:
                raise ValueError("delta is keyed by arm 0 or 1")
            if not np.isfinite(shift):
                raise ValueError("delta values must be finite")
        return value

    @model_validator(mode="after")
    def _shifts_need_delta(self):
        if self.kind != MechanismKind.DELTA and (self.shifts or any(self.delta.values())):
            raise ValueError(f"shifts are only used by the delta mechanism, not {self.kind.value}")
        return self

    @classmethod
    def collapsed(cls, delta_0: float, delta_1: float) -> "MechanismSpec":
        return cls(kind=MechanismKind.DELTA, delta={0: float(delta_0), 1: float(delta_1)})

    def shift(self, arm: int, visit: str, pattern: int) -> float:
        if self.kind != MechanismKind.DELTA:
            return 0.0
        candidates = [entry for entry in self.shifts if entry.matches(arm, visit, pattern)]
        if candidates:
            return max(candidates, key=lambda entry: entry.specificity).delta
        return float(self.delta.get(arm, 0.0))


def treatment_index(dataset: Dataset) -> int:
    """Column of the treatment indicator in the full matrix; checks it is 0/1."""
    column = dataset.schema.treatment_column
    if column is None:
        raise ConfigurationError("this mechanism needs a treatment covariate", field="mechanism.kind")
    arms = dataset.arms
    if arms.size and not np.isin(arms, ARMS).all():
        raise ConfigurationError(f"treatment covariate {column!r} must be coded 0/1", field="mechanism.kind")
    return dataset.covariate_names.index(column)


def complete_dropouts(
    dataset: Dataset,
    draw: ParameterDraw,
    designs: list[VisitDesign],
    mechanism: MechanismSpec,
    rng: np.random.Generator,
    rows=None,
) -> np.ndarray:
    """Fill the post-dropout cells of ``rows`` (default all) visit by visit.

    Visit j is drawn for every selected subject whose dropout pattern is at most j,
    at the parameters of ``draw``; each imputed value enters the design of later
    visits.
    """
    rows = np.arange(dataset.n) if rows is None else np.atleast_1d(np.asarray(rows, dtype=int))
    y = np.array(draw.y, copy=True)
    if not rows.size:
        return y
    needs_arm = mechanism.kind != MechanismKind.MAR
    arm_col = treatment_index(dataset) if needs_arm else None
    arms = np.zeros(dataset.n, dtype=int) if arm_col is None else dataset.x[:, arm_col].astype(int)
    s = dataset.s
    for design in designs:
        j = design.index
        target = rows[s[rows] <= j]
        if not target.size:
            continue
        full = np.hstack([dataset.x[target], y[target]])
        if mechanism.kind == MechanismKind.COPY_REFERENCE:
            full[:, arm_col] = 0.0
        offset = 0.0
        if mechanism.kind == MechanismKind.DELTA:
            offset = np.array([mechanism.shift(int(arms[i]), design.name, int(s[i])) for i in target])
        y[target, j] = design.family.sample_response(design.matrix(full), draw.params[j], rng, offset)
    return y


def impute_dropout(
    dataset: Dataset,
    i: int,
    draw: ParameterDraw,
    designs: list[VisitDesign],
    mechanism: MechanismSpec,
    rng: np.random.Generator,
) -> np.ndarray:
    """Subject i's response vector with its post-dropout visits imputed."""
    return complete_dropouts(dataset, draw, designs, mechanism, rng, rows=[i])[i]


def _complete_one(task, dataset, designs, mechanism, stream):
    k, draw = task
    rng = stream.child(PURPOSE_DROPOUT, k).generator()
    return complete_dropouts(dataset, draw, designs, mechanism, rng)


def complete_all(
    draws: list[ParameterDraw],
    dataset: Dataset,
    designs: list[VisitDesign],
    mechanism: MechanismSpec,
    seed: int,
    workers: int | None = 1,
) -> list[np.ndarray]:
    """Completed response matrices, one per draw.

    Imputation k always uses the stream (seed, dropout, k), so two mechanisms
    applied to the same draws share their random numbers.
    """
    if mechanism.kind != MechanismKind.MAR:
        treatment_index(dataset)
    func = partial(_complete_one, dataset=dataset, designs=designs, mechanism=mechanism, stream=RngStream(seed))
    completed = map_tasks(func, list(enumerate(draws)), workers)
    logger.debug("Completed %d datasets under %s", len(completed), mechanism.kind.value)
    return completed


def generate_imputations(
    draws: list[ParameterDraw],
    dataset: Dataset,
    designs: list[VisitDesign],
    mechanism: MechanismSpec,
    seed: int,
    workers: int | None = 1,
    restore: np.ndarray | None = None,
) -> list[pd.DataFrame]:
    """m completed datasets as frames; ``restore`` reorders rows back to input order."""
    frames = []
    for y in complete_all(draws, dataset, designs, mechanism, seed, workers):
        frame = dataset.to_frame(y)
        if restore is not None:
            frame = frame.iloc[restore].reset_index(drop=True)
        frames.append(frame)
    return frames
