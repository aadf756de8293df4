# Licensed under the MIT License.

"""Sequential model specification and its resolution against a dataset."""

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field, model_validator

from mdalab.data.dataset import Dataset
from mdalab.models.base import Family, FamilyKind
from mdalab.models.registry import FamilyRegistry
from mdalab.paths import config
from mdalab.samplers.mh import GaussianPrior
from mdalab.skewt.gibbs import SkewTHyper
from mdalab.utils.status import ConfigurationError

MCMC_DEFAULTS = config.section("mcmc")


class VisitModel(BaseModel):
    """Regression of one visit on covariates and earlier visits.

    ``predictors`` defaults to every covariate and every earlier visit. Interactions are
    products of two predictor-namespace columns appended after the main effects.
    """

    visit: str
    family: FamilyKind | None = None
    predictors: list[str] | None = None
    interactions: list[tuple[str, str]] = Field(default_factory=list)
    prior_mean: float | list[float] = 0.0
    prior_precision: float | list[float] = 1e-8
    skewt: SkewTHyper = Field(default_factory=SkewTHyper)


class ModelSpec(BaseModel):
    visits: list[VisitModel] = Field(default_factory=list)

    @model_validator(mode="after")
    def _unique(self):
        names = [v.visit for v in self.visits]
        if len(set(names)) != len(names):
            raise ValueError("each visit may be specified once")
        return self

    def for_visit(self, name: str) -> VisitModel:
        for visit in self.visits:
            if visit.visit == name:
                return visit
        return VisitModel(visit=name)


class McmcConfig(BaseModel):
    burn_in: int = Field(default=int(MCMC_DEFAULTS.get("burn_in", 5000)), ge=0)
    thin: int = Field(default=int(MCMC_DEFAULTS.get("thin", 50)), ge=1)
    draws: int = Field(default=int(MCMC_DEFAULTS.get("draws", 100)), ge=1)
    seed: int = 0
    chains: int = Field(default=int(MCMC_DEFAULTS.get("chains", 1)), ge=1)
    debug: bool = False


@dataclass
class VisitDesign:
    """A visit model resolved to column indices of the full matrix [x | y]."""

    index: int
    name: str
    column: int
    family: Family
    terms: list[tuple[int, int | None]]
    term_names: list[str]
    prior: GaussianPrior
    hyper: SkewTHyper

    @property
    def is_skew(self) -> bool:
        return self.family.kind in (FamilyKind.SKEW_T, FamilyKind.SKEW_NORMAL)

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def matrix(self, full: np.ndarray) -> np.ndarray:
        full = np.atleast_2d(full)
        out = np.empty((full.shape[0], len(self.terms)))
        for k, (a, b) in enumerate(self.terms):
            out[:, k] = full[:, a] if b is None else full[:, a] * full[:, b]
        return out

    def row(self, full_row: np.ndarray) -> np.ndarray:
        return self.matrix(full_row[None, :])[0]

    def jacobian(self, full_row: np.ndarray, cells: list[int]) -> np.ndarray:
        """dz/d(full_row[cells]) for one row."""
        jac = np.zeros((len(self.terms), len(cells)))
        for k, (a, b) in enumerate(self.terms):
            for c, cell in enumerate(cells):
                if b is None:
                    jac[k, c] = 1.0 if a == cell else 0.0
                else:
                    jac[k, c] = (full_row[b] if a == cell else 0.0) + (full_row[a] if b == cell else 0.0)
        return jac

    def couples(self, cells) -> bool:
        """Whether some interaction multiplies two of the given columns."""
        cells = set(cells)
        return any(b is not None and a in cells and b in cells for a, b in self.terms)

    def coupled_pairs(self, cells) -> set[tuple[int, int]]:
        cells = set(cells)
        return {(a, b) for a, b in self.terms if b is not None and a in cells and b in cells}


def _vector(value, dim, field, name):
    values = np.full(dim, float(value)) if np.isscalar(value) else np.asarray(value, dtype=float)
    if values.shape != (dim,):
        raise ConfigurationError(f"expected {dim} values, got {values.size}", field=f"model.visits.{name}.{field}")
    return values


def resolve_model(dataset: Dataset, spec: ModelSpec, registry: FamilyRegistry | None = None) -> list[VisitDesign]:
    """Check a model spec against the data and build one design per visit."""
    registry = registry or FamilyRegistry()
    names = dataset.column_names
    q = dataset.q
    known = set(dataset.visit_names)
    for visit in spec.visits:
        if visit.visit not in known:
            raise ConfigurationError(f"unknown visit {visit.visit!r}", field="model.visits")
    designs = []
    for j, visit_type in enumerate(dataset.visit_types):
        model = spec.for_visit(visit_type.name)
        allowed = names[: q + j]
        predictors = list(allowed) if model.predictors is None else list(model.predictors)
        for predictor in predictors + [name for pair in model.interactions for name in pair]:
            if predictor not in allowed:
                raise ConfigurationError(
                    f"{predictor!r} is not a covariate or an earlier visit",
                    field=f"model.visits.{visit_type.name}.predictors",
                )
        terms = [(names.index(p), None) for p in predictors]
        term_names = list(predictors)
        for a, b in model.interactions:
            terms.append((names.index(a), names.index(b)))
            term_names.append(f"{a}:{b}")
        family = registry.for_visit(visit_type, len(terms), model.family)
        prior = GaussianPrior(
            _vector(model.prior_mean, family.n_params, "prior_mean", visit_type.name),
            np.diag(_vector(model.prior_precision, family.n_params, "prior_precision", visit_type.name)),
        )
        designs.append(VisitDesign(j, visit_type.name, q + j, family, terms, term_names, prior, model.skewt))
    return designs
