# Licensed under the MIT License.

"""Subject-level longitudinal datasets and their CSV representation."""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import pandas as pd

from mdalab.data.schema import CATEGORICAL_KINDS, ColumnSchema, VariableKind, VisitType
from mdalab.utils.status import DomainError, ParseError, SchemaError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubjectRecord:
    id: str
    x: np.ndarray
    y: np.ndarray
    observed: np.ndarray
    s: int
    arm: int | None


def dropout_patterns(observed: np.ndarray) -> np.ndarray:
    """Index (1-based) of each row's last observed visit, 0 when none is observed."""
    if observed.shape[1] == 0:
        return np.zeros(observed.shape[0], dtype=int)
    p = observed.shape[1]
    reversed_first = np.argmax(observed[:, ::-1], axis=1)
    return np.where(observed.any(axis=1), p - reversed_first, 0).astype(int)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Rectangular data: n subjects, q observed covariates, p ordered visits.

    Responses live in ``y`` with NaN in unobserved cells and ``observed`` holding
    the flags; both arrays are read-only after construction.
    """

    schema: ColumnSchema
    ids: np.ndarray
    x: np.ndarray
    y: np.ndarray
    observed: np.ndarray
    s: np.ndarray = field(init=False)

    def __post_init__(self):
        y = np.array(self.y, dtype=float, copy=True)
        observed = np.array(self.observed, dtype=bool, copy=True)
        y[~observed] = np.nan
        x = np.array(self.x, dtype=float, copy=True).reshape(len(self.ids), len(self.schema.covariate_names))
        for name, value in (("ids", np.asarray(self.ids, dtype=object).copy()), ("x", x), ("y", y), ("observed", observed)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        patterns = dropout_patterns(observed)
        patterns.setflags(write=False)
        object.__setattr__(self, "s", patterns)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.y.shape[1]

    @property
    def q(self) -> int:
        return self.x.shape[1]

    @property
    def visit_types(self) -> list[VisitType]:
        return list(self.schema.visits)

    @property
    def covariate_names(self) -> list[str]:
        return self.schema.covariate_names

    @property
    def visit_names(self) -> list[str]:
        return self.schema.visit_names

    @property
    def column_names(self) -> list[str]:
        """Design namespace: covariates followed by visits."""
        return self.covariate_names + self.visit_names

    @cached_property
    def arms(self) -> np.ndarray | None:
        column = self.schema.treatment_column
        if column is None:
            return None
        return self.x[:, self.covariate_names.index(column)]

    @property
    def subjects(self) -> list[SubjectRecord]:
        arms = self.arms
        return [
            SubjectRecord(
                id=str(self.ids[i]),
                x=self.x[i],
                y=self.y[i],
                observed=self.observed[i],
                s=int(self.s[i]),
                arm=None if arms is None else int(arms[i]),
            )
            for i in range(self.n)
        ]

    def take(self, order: np.ndarray) -> "Dataset":
        return Dataset(self.schema, self.ids[order], self.x[order], self.y[order], self.observed[order])

    def full_matrix(self, y: np.ndarray | None = None) -> np.ndarray:
        """Covariates and responses side by side, in ``column_names`` order."""
        return np.hstack([self.x, self.y if y is None else y])

    def to_frame(self, y: np.ndarray | None = None) -> pd.DataFrame:
        """Tabular view with native names; ``y`` substitutes completed responses."""
        values = self.y if y is None else y
        frame = pd.DataFrame({self.schema.id_column: self.ids})
        offset = 1 if self.schema.intercept else 0
        for k, name in enumerate(self.schema.covariates):
            frame[name] = self.x[:, k + offset]
        for j, visit in enumerate(self.schema.visits):
            column = values[:, j]
            if visit.discrete and not np.isnan(column).any():
                column = column.astype(int)
            frame[visit.name] = column
        return frame


def _parse_float(raw: str, row: int, column: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise ParseError(row, column, raw) from exc
    if not np.isfinite(value):
        raise ParseError(row, column, raw)
    return value


def _check_domain(value: float, visit: VisitType) -> None:
    if visit.kind == VariableKind.CONTINUOUS:
        return
    if value != np.floor(value):
        raise DomainError(visit.name, value, "expected an integer code")
    if visit.kind == VariableKind.COUNT:
        if value < 0:
            raise DomainError(visit.name, value, "counts must be non-negative")
    elif visit.kind in CATEGORICAL_KINDS and not 1 <= value <= visit.levels:
        raise DomainError(visit.name, value, f"categories must lie in 1..{visit.levels}")


def load_dataset(path, schema: ColumnSchema) -> Dataset:
    """Read a subject-level CSV.

    Args:
        path (str | Path): CSV file with a header row.
        schema (ColumnSchema): Column roles and the missing-value token.

    Returns:
        Dataset: The parsed data; the token and empty cells become unobserved.
    """
    frame = pd.read_csv(Path(path), dtype=str, keep_default_na=False)
    required = [schema.id_column, *schema.covariates, *schema.visit_names]
    for column in required:
        if column not in frame.columns:
            raise SchemaError(column, "declared in the schema but absent from the header")

    missing = {schema.missing_token, ""}
    n = len(frame)
    x = np.ones((n, len(schema.covariate_names)))
    offset = 1 if schema.intercept else 0
    for k, column in enumerate(schema.covariates):
        for i, raw in enumerate(frame[column].str.strip()):
            if raw in missing:
                raise SchemaError(column, f"covariates must be fully observed (row {i + 1})")
            x[i, k + offset] = _parse_float(raw, i + 1, column)

    y = np.full((n, len(schema.visits)), np.nan)
    observed = np.zeros_like(y, dtype=bool)
    for j, visit in enumerate(schema.visits):
        for i, raw in enumerate(frame[visit.name].str.strip()):
            if raw in missing:
                continue
            value = _parse_float(raw, i + 1, visit.name)
            _check_domain(value, visit)
            y[i, j] = value
            observed[i, j] = True

    treatment = schema.treatment_column
    dataset = Dataset(schema, frame[schema.id_column].to_numpy(dtype=object), x, y, observed)
    logger.info("Loaded %d subjects, %d visits, %d missing cells from %s", n, dataset.p, int((~observed).sum()), path)
    if treatment is not None:
        logger.debug("Treatment indicator: %s", treatment)
    return dataset


def _format_cell(value: float, discrete: bool, token: str) -> str:
    if np.isnan(value):
        return token
    if discrete:
        return str(int(value))
    return repr(float(value))


def save_dataset(dataset: Dataset, path, y: np.ndarray | None = None) -> Path:
    """Write a dataset (or a completed version of it) in the loader's format.

    Floats are written with ``repr`` so a reload reproduces them bit-exactly.
    """
    schema = dataset.schema
    values = dataset.y if y is None else y
    offset = 1 if schema.intercept else 0
    columns = {schema.id_column: [str(i) for i in dataset.ids]}
    for k, name in enumerate(schema.covariates):
        columns[name] = [repr(float(v)) for v in dataset.x[:, k + offset]]
    for j, visit in enumerate(schema.visits):
        columns[visit.name] = [_format_cell(v, visit.discrete, schema.missing_token) for v in values[:, j]]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(columns, columns=list(columns)).to_csv(path, index=False)
    return path
