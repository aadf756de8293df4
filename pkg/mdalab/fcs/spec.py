# Licensed under the MIT License.

"""Conditional models of the fully conditional specification."""

from dataclasses import dataclass, field

from pydantic import BaseModel, Field, model_validator

from mdalab.data.dataset import Dataset
from mdalab.models.base import Family, FamilyKind
from mdalab.models.registry import FamilyRegistry
from mdalab.paths import config
from mdalab.utils.status import ConfigurationError

FCS_DEFAULTS = config.section("fcs")
SKEW_KINDS = {FamilyKind.SKEW_T, FamilyKind.SKEW_NORMAL}


class FcsConditional(BaseModel):
    """Model of one visit given the covariates and the other visits.

    ``predictors`` defaults to every covariate and every other visit.
    """

    visit: str
    family: FamilyKind | None = None
    predictors: list[str] | None = None


class FcsModelSpec(BaseModel):
    conditionals: list[FcsConditional] = Field(default_factory=list)
    iterations: int = Field(default=int(FCS_DEFAULTS.get("iterations", 200)), ge=0)
    skew_cycles: int = Field(default=int(FCS_DEFAULTS.get("skew_cycles", 200)), ge=1)
    order: list[str] | None = None

    @model_validator(mode="after")
    def _unique(self):
        names = [c.visit for c in self.conditionals]
        if len(set(names)) != len(names):
            raise ValueError("each visit may have one conditional model")
        if self.order is not None and len(set(self.order)) != len(self.order):
            raise ValueError("order lists a visit twice")
        return self

    def for_visit(self, name: str) -> FcsConditional:
        for conditional in self.conditionals:
            if conditional.visit == name:
                return conditional
        return FcsConditional(visit=name)


@dataclass
class ConditionalDesign:
    """A conditional model resolved to full-matrix columns.

    Subjects with a gap at this visit are grouped by dropout pattern; pattern s
    uses the predictors among the covariates and the visits up to s.
    """

    index: int
    name: str
    column: int
    kind: FamilyKind
    predictors: list[int]
    q: int
    families: dict[int, Family] = field(default_factory=dict)

    def columns_for(self, pattern: int) -> list[int]:
        return [c for c in self.predictors if c < self.q + pattern]

    def family_for(self, pattern: int, registry: FamilyRegistry, visit_type) -> Family:
        if pattern not in self.families:
            self.families[pattern] = registry.for_visit(visit_type, len(self.columns_for(pattern)), self.kind)
        return self.families[pattern]


def resolve_conditionals(dataset: Dataset, spec: FcsModelSpec, registry: FamilyRegistry | None = None) -> list[ConditionalDesign]:
    """Conditional designs in sweep order."""
    registry = registry or FamilyRegistry()
    names = dataset.column_names
    q = dataset.q
    known = dataset.visit_names
    for conditional in spec.conditionals:
        if conditional.visit not in known:
            raise ConfigurationError(f"unknown visit {conditional.visit!r}", field="fcs.conditionals")
    order = spec.order if spec.order is not None else known
    if sorted(order) != sorted(known):
        raise ConfigurationError("order must list every visit once", field="fcs.order")
    designs = []
    for name in order:
        j = known.index(name)
        visit_type = dataset.visit_types[j]
        conditional = spec.for_visit(name)
        field_name = f"fcs.conditionals.{name}"
        kind = conditional.family or registry.default_kind(visit_type)
        if kind in SKEW_KINDS:
            raise ConfigurationError("skew families belong to the sequential model, not to conditionals", field=field_name)
        registry.check_compatible(kind, visit_type)
        predictors = [p for p in names if p != name] if conditional.predictors is None else list(conditional.predictors)
        for predictor in predictors:
            if predictor == name:
                raise ConfigurationError(f"{name!r} cannot predict itself", field=f"{field_name}.predictors")
            if predictor not in names:
                raise ConfigurationError(f"unknown predictor {predictor!r}", field=f"{field_name}.predictors")
        designs.append(ConditionalDesign(j, name, q + j, kind, sorted(names.index(p) for p in predictors), q))
    return designs
