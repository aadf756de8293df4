# Licensed under the MIT License.

"""Common interface of the sequential regression families."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from enum import Enum
from typing import ClassVar

import numpy as np

from mdalab.utils.status import DomainError


class FamilyKind(str, Enum):
    NORMAL = "normal"
    LOGISTIC = "logistic"
    PROP_ODDS = "prop_odds"
    MULTI_LOGIT = "multi_logit"
    POISSON = "poisson"
    NEG_BINOMIAL = "neg_binomial"
    SKEW_NORMAL = "skew_normal"
    SKEW_T = "skew_t"


@dataclass(frozen=True)
class FamilyParams:
    """Parameter draw of one visit model.

    ``beta`` is the full parameter vector the MH kernel moves (cutpoint transforms
    first for proportional odds, category blocks for multinomial logit). ``phi`` is
    the precision for continuous families and the overdispersion for the negative
    binomial. ``psi`` and ``nu`` are used by the skew families only.
    """

    beta: np.ndarray
    phi: float | None = None
    psi: float = 0.0
    nu: float = np.inf

    def with_beta(self, beta: np.ndarray) -> "FamilyParams":
        return replace(self, beta=np.asarray(beta, dtype=float))

    def vector(self) -> np.ndarray:
        """Flat vector of all free parameters, for diagnostics."""
        extra = [v for v in (self.phi,) if v is not None]
        return np.concatenate([self.beta, extra])


@dataclass(frozen=True)
class LinearPredictorContext:
    """Where one observation's predictors depend on missing continuous cells.

    Attributes:
        z: Design vector of the observation.
        jacobian: dz/dy_c, one column per missing cell of the subject.
        response: Index of the cell that is this observation's own response, if any.
    """

    z: np.ndarray
    jacobian: np.ndarray
    response: int | None = None

    def __post_init__(self):
        if self.jacobian.ndim != 2 or self.jacobian.shape[0] != self.z.shape[0]:
            raise ValueError("jacobian must have one row per design column")
        if self.response is not None and not 0 <= self.response < self.jacobian.shape[1]:
            raise ValueError("response cell index out of range")

    @classmethod
    def from_selector(cls, z, selector, response=None, n_cells=None):
        """Main-effects context: cell k enters z at position ``selector[k]``.

        ``None`` in the selector marks a cell that is not a predictor of this visit.
        """
        z = np.asarray(z, dtype=float)
        n_cells = len(selector) if n_cells is None else n_cells
        jacobian = np.zeros((z.shape[0], n_cells))
        for k, position in enumerate(selector):
            if position is not None:
                jacobian[position, k] = 1.0
        return cls(z, jacobian, response)

    @property
    def selector(self) -> list[int | None]:
        positions = []
        for column in self.jacobian.T:
            hits = np.flatnonzero(column)
            positions.append(int(hits[0]) if hits.size == 1 and column[hits[0]] == 1.0 else None)
        return positions

    def beta_ic(self, beta: np.ndarray) -> np.ndarray:
        """d(eta)/d(y_c) minus d(y)/d(y_c): the coefficient sub-vector with -1 for the response."""
        derivative = self.jacobian.T @ beta
        if self.response is not None:
            derivative = derivative.copy()
            derivative[self.response] -= 1.0
        return derivative


def as_design(z) -> np.ndarray:
    return np.atleast_2d(np.asarray(z, dtype=float))


class Family(ABC):
    """A regression family for one visit given its r-dimensional design."""

    kind: ClassVar[FamilyKind]
    discrete: ClassVar[bool] = True

    def __init__(self, n_predictors: int, levels: int | None = None):
        self.n_predictors = n_predictors
        self.levels = levels

    def __repr__(self):
        levels = f", K={self.levels}" if self.levels else ""
        return f"{type(self).__name__}(r={self.n_predictors}{levels})"

    @property
    def n_params(self) -> int:
        return self.n_predictors

    def initial_params(self) -> FamilyParams:
        return FamilyParams(beta=np.zeros(self.n_params))

    def coefficients(self, params: FamilyParams) -> np.ndarray:
        """Slope vector that multiplies z in the linear predictor."""
        return params.beta[self.n_params - self.n_predictors :]

    def linear_predictor(self, z, params: FamilyParams, offset=0.0) -> np.ndarray:
        return as_design(z) @ self.coefficients(params) + offset

    def check_support(self, y) -> None:
        pass

    @abstractmethod
    def log_density(self, y, z, params: FamilyParams, offset=0.0, weight=1.0) -> np.ndarray:
        """Per-observation log f(y | z, params)."""

    @abstractmethod
    def score_beta(self, y, z, params: FamilyParams, offset=0.0, weight=1.0) -> np.ndarray:
        """Sum over observations of d log f / d beta."""

    @abstractmethod
    def fisher_beta(self, y, z, params: FamilyParams, offset=0.0, weight=1.0) -> np.ndarray:
        """Sum over observations of the expected information in beta."""

    @abstractmethod
    def eta_derivatives(self, y, eta, params: FamilyParams, weight=1.0) -> tuple[np.ndarray, np.ndarray]:
        """First derivative and negative second derivative of log f in eta."""

    @abstractmethod
    def sample_response(self, z, params: FamilyParams, rng: np.random.Generator, offset=0.0) -> np.ndarray:
        """Draw responses; every family consumes a fixed number of variates per row."""

    def support(self, z, params: FamilyParams, offset=0.0) -> np.ndarray:
        raise NotImplementedError(f"{self.kind.value} has no enumerable support")

    def grad_yc(self, y, ctx: LinearPredictorContext, params: FamilyParams, offset=0.0, weight=1.0) -> np.ndarray:
        eta = float(ctx.z @ self.coefficients(params)) + offset
        d1, _ = self.eta_derivatives(np.atleast_1d(y), np.atleast_1d(eta), params, weight)
        return float(d1[0]) * ctx.beta_ic(self.coefficients(params))

    def hess_yc(self, y, ctx: LinearPredictorContext, params: FamilyParams, offset=0.0, weight=1.0) -> np.ndarray:
        eta = float(ctx.z @ self.coefficients(params)) + offset
        _, d2 = self.eta_derivatives(np.atleast_1d(y), np.atleast_1d(eta), params, weight)
        b = ctx.beta_ic(self.coefficients(params))
        return float(d2[0]) * np.outer(b, b)


class GLMFamily(Family):
    """Families with a single linear predictor; score and Fisher follow from eta derivatives."""

    def score_beta(self, y, z, params, offset=0.0, weight=1.0):
        z = as_design(z)
        y = np.asarray(y, dtype=float).reshape(-1)
        self.check_support(y)
        d1, _ = self.eta_derivatives(y, self.linear_predictor(z, params, offset), params, weight)
        return z.T @ d1

    def fisher_beta(self, y, z, params, offset=0.0, weight=1.0):
        z = as_design(z)
        info = self.expected_information(self.linear_predictor(z, params, offset), params, weight)
        return (z * info[:, None]).T @ z

    @abstractmethod
    def expected_information(self, eta, params, weight=1.0) -> np.ndarray:
        """Per-observation expected negative second derivative in eta."""


def check_categories(y, levels: int, name: str) -> None:
    y = np.asarray(y, dtype=float)
    bad = (y != np.floor(y)) | (y < 1) | (y > levels)
    if np.any(bad):
        raise DomainError(name, y[bad][0], f"categories must lie in 1..{levels}")


def check_counts(y, name: str) -> None:
    y = np.asarray(y, dtype=float)
    bad = (y != np.floor(y)) | (y < 0)
    if np.any(bad):
        raise DomainError(name, y[bad][0], "counts must be non-negative integers")
