# Licensed under the MIT License.

"""Validated run configuration read from a JSON or YAML document."""

import hashlib
import json
import logging
from enum import Enum
from pathlib import Path

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from mdalab.analysis.fit import AnalysisSpec
from mdalab.config import env_overrides, read_document
from mdalab.controlled.mechanism import MechanismSpec
from mdalab.controlled.tipping import TippingSpec
from mdalab.data.schema import ColumnSchema
from mdalab.engine.spec import McmcConfig, ModelSpec
from mdalab.fcs.spec import FcsModelSpec
from mdalab.paths import RESULTS_DIR
from mdalab.utils.status import ConfigurationError

logger = logging.getLogger(__name__)


class EngineKind(str, Enum):
    MDA = "mda"
    FCS = "fcs"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class DatasetSection(BaseModel):
    path: str
    columns: ColumnSchema


class OutputSection(BaseModel):
    """Where results go. ``format`` selects pooled and tipping result files; completed datasets are always CSV."""

    out: str = str(RESULTS_DIR)
    concatenate: bool = False
    format: OutputFormat = OutputFormat.CSV


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dataset: DatasetSection | None = None
    engine: EngineKind = EngineKind.MDA
    model: ModelSpec = Field(default_factory=ModelSpec)
    mcmc: McmcConfig = Field(default_factory=McmcConfig)
    fcs: FcsModelSpec = Field(default_factory=FcsModelSpec)
    mechanism: MechanismSpec = Field(default_factory=MechanismSpec)
    tipping: TippingSpec | None = None
    analysis: AnalysisSpec | None = None
    output: OutputSection = Field(default_factory=OutputSection)
    workers: int | None = None

    @model_validator(mode="after")
    def _check_references(self):
        if self.dataset is None:
            return self
        columns = self.dataset.columns
        visits = set(columns.visit_names)
        for visit in self.model.visits:
            if visit.visit not in visits:
                raise ValueError(f"model.visits: unknown visit {visit.visit!r}")
        for conditional in self.fcs.conditionals:
            if conditional.visit not in visits:
                raise ValueError(f"fcs.conditionals: unknown visit {conditional.visit!r}")
        for shift in self.mechanism.shifts:
            if shift.visit is not None and shift.visit not in visits:
                raise ValueError(f"mechanism.shifts: unknown visit {shift.visit!r}")
        if self.analysis is not None:
            known = set(columns.covariates) | visits
            if self.analysis.response not in visits:
                raise ValueError(f"analysis.response: {self.analysis.response!r} is not a visit")
            for predictor in self.analysis.predictors:
                if predictor not in known:
                    raise ValueError(f"analysis.predictors: unknown column {predictor!r}")
        if self.mechanism.kind.value != "mar" and columns.treatment_column is None:
            raise ValueError("mechanism: controlled imputation needs a treatment covariate")
        return self

    @property
    def seed(self) -> int:
        return self.mcmc.seed

    @property
    def out_dir(self) -> Path:
        return Path(self.output.out)


def _dotted(loc) -> str:
    return ".".join(str(part) for part in loc)


def validate_run_config(document: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(document)
    except ValidationError as exc:
        errors = exc.errors()
        details = "; ".join(f"{_dotted(e['loc']) or '<root>'}: {e['msg']}" for e in errors)
        raise ConfigurationError(details, field=_dotted(errors[0]["loc"]) or None) from exc


def apply_overrides(document: dict, seed: int | None = None, out: str | None = None) -> dict:
    """Layer environment and flag values over a config document.

    Precedence is flag, then environment, then the document itself.
    """
    document = dict(document)
    env = env_overrides()
    seed = seed if seed is not None else env.get("seed")
    out = out if out is not None else env.get("out")
    if seed is not None:
        document["mcmc"] = {**document.get("mcmc", {}), "seed": seed}
    if out is not None:
        document["output"] = {**document.get("output", {}), "out": str(out)}
    return document


def load_run_config(path=None, seed: int | None = None, out: str | None = None) -> RunConfig:
    """Read, override and validate a run configuration.

    Raises:
        FileNotFoundError: The config file does not exist.
        ConfigurationError: The document is malformed or fails validation.
    """
    document = {}
    if path is not None:
        try:
            document = read_document(path)
        except (yaml.YAMLError, ValueError) as exc:
            raise ConfigurationError(str(exc), field="config") from exc
    return validate_run_config(apply_overrides(document, seed, out))


def config_hash(cfg: RunConfig) -> str:
    canonical = json.dumps(cfg.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def run_config_schema() -> dict:
    return RunConfig.model_json_schema()
