# Licensed under the MIT License.

"""Column schema and per-visit variable kinds."""

from enum import Enum

from pydantic import BaseModel, Field, model_validator


class VariableKind(str, Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"
    ORDINAL = "ordinal"
    NOMINAL = "nominal"
    COUNT = "count"


DISCRETE_KINDS = {VariableKind.BINARY, VariableKind.ORDINAL, VariableKind.NOMINAL, VariableKind.COUNT}
CATEGORICAL_KINDS = {VariableKind.BINARY, VariableKind.ORDINAL, VariableKind.NOMINAL}


class VisitType(BaseModel):
    """Variable kind of one visit; categorical kinds carry their level count K."""

    name: str
    kind: VariableKind
    levels: int | None = None

    @model_validator(mode="after")
    def _check_levels(self):
        if self.kind == VariableKind.BINARY:
            if self.levels not in (None, 2):
                raise ValueError(f"binary visit {self.name!r} must have 2 levels")
            self.levels = 2
        elif self.kind in (VariableKind.ORDINAL, VariableKind.NOMINAL):
            if self.levels is None or self.levels < 2:
                raise ValueError(f"{self.kind.value} visit {self.name!r} needs levels >= 2")
        elif self.levels is not None:
            raise ValueError(f"{self.kind.value} visit {self.name!r} takes no levels")
        return self

    @property
    def discrete(self) -> bool:
        return self.kind in DISCRETE_KINDS


class ColumnSchema(BaseModel):
    """Names the CSV columns: subject id, covariates and responses in visit order.

    With ``intercept`` set, a constant covariate named ``intercept`` is prepended and
    is not read from the file. The treatment indicator is the last covariate unless
    ``treatment`` names another one.
    """

    id_column: str = "id"
    covariates: list[str] = Field(default_factory=list)
    visits: list[VisitType]
    missing_token: str = "NA"
    intercept: bool = True
    treatment: str | None = None

    @model_validator(mode="after")
    def _check_names(self):
        names = [self.id_column, *self.covariates, *(v.name for v in self.visits)]
        if self.intercept and "intercept" in names:
            raise ValueError("'intercept' is reserved when intercept is enabled")
        if len(set(names)) != len(names):
            raise ValueError("column names must be unique")
        if self.treatment is not None and self.treatment not in self.covariates:
            raise ValueError(f"treatment {self.treatment!r} is not a covariate")
        return self

    @property
    def covariate_names(self) -> list[str]:
        return (["intercept"] if self.intercept else []) + list(self.covariates)

    @property
    def visit_names(self) -> list[str]:
        return [v.name for v in self.visits]

    @property
    def treatment_column(self) -> str | None:
        if self.treatment is not None:
            return self.treatment
        return self.covariates[-1] if self.covariates else None
