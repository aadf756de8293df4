# Licensed under the MIT License.

"""Analysis-model fits on completed datasets."""

import logging
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
import pandas as pd
import statsmodels.api as sm
from pydantic import BaseModel, Field
from statsmodels.tools.sm_exceptions import PerfectSeparationError, PerfectSeparationWarning

from mdalab.utils.status import ConvergenceError, DataError, SeparationError, SingularDesignError

logger = logging.getLogger(__name__)


class AnalysisFamily(str, Enum):
    LOGISTIC = "logistic"
    PROBIT = "probit"
    LINEAR = "linear"


class AnalysisSpec(BaseModel):
    """Regression of one visit on a list of columns of the completed data.

    For logistic and probit analyses the response is coded 1 when it equals
    ``success`` and 0 otherwise. ``coefficient`` names the reported coefficient
    and defaults to the last predictor (the treatment indicator by convention).
    """

    response: str
    family: AnalysisFamily = AnalysisFamily.PROBIT
    predictors: list[str] = Field(default_factory=list)
    intercept: bool = True
    coefficient: str | None = None
    success: float = 1.0

    @property
    def term_names(self) -> list[str]:
        return (["intercept"] if self.intercept else []) + list(self.predictors)

    @property
    def target(self) -> str:
        if self.coefficient is not None:
            return self.coefficient
        return self.term_names[-1]


@dataclass
class AnalysisFit:
    names: list[str]
    estimates: np.ndarray
    variances: np.ndarray
    gradient_norm: float = 0.0


def analysis_design(frame: pd.DataFrame, spec: AnalysisSpec) -> tuple[np.ndarray, np.ndarray]:
    columns = [spec.response] + list(spec.predictors)
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DataError(f"completed data lacks columns {missing}")
    used = frame[columns].astype(float)
    if used.isna().any().any():
        raise DataError("completed data still has missing cells in the analysis columns")
    x = used[spec.predictors].to_numpy()
    if spec.intercept:
        x = np.column_stack([np.ones(len(used)), x])
    y = used[spec.response].to_numpy()
    if spec.family != AnalysisFamily.LINEAR:
        y = (y == spec.success).astype(float)
    return y, x


def _binary_model(spec, y, x):
    if spec.family == AnalysisFamily.PROBIT:
        return sm.Probit(y, x)
    return sm.Logit(y, x)


def fit_analysis(frame: pd.DataFrame, spec: AnalysisSpec) -> AnalysisFit:
    """MLE coefficients and the diagonal of their inverse information."""
    y, x = analysis_design(frame, spec)
    rank = np.linalg.matrix_rank(x) if x.size else 0
    if rank < x.shape[1]:
        raise SingularDesignError(rank, x.shape[1])
    if spec.family == AnalysisFamily.LINEAR:
        result = sm.OLS(y, x).fit()
        gradient = x.T @ (y - x @ result.params)
    else:
        model = _binary_model(spec, y, x)
        with warnings.catch_warnings():
            warnings.simplefilter("error", PerfectSeparationWarning)
            try:
                result = model.fit(method="newton", maxiter=100, disp=0)
            except (PerfectSeparationWarning, PerfectSeparationError) as exc:
                raise SeparationError(spec.response) from exc
        if not result.mle_retvals.get("converged", False):
            raise ConvergenceError(spec.response, "analysis model did not converge")
        gradient = model.score(result.params)
    variances = np.diag(np.asarray(result.cov_params()))
    return AnalysisFit(spec.term_names, np.asarray(result.params, dtype=float), variances, float(np.linalg.norm(gradient)))
