# Licensed under the MIT License.

"""Fisher-scoring maximum likelihood for the regression families."""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from mdalab.models.base import Family, FamilyKind, FamilyParams
from mdalab.utils.linalg import chol_inverse, chol_solve, safe_cholesky
from mdalab.utils.status import ConvergenceError, DecompositionError, SeparationError

logger = logging.getLogger(__name__)

CATEGORICAL = {FamilyKind.LOGISTIC, FamilyKind.PROP_ODDS, FamilyKind.MULTI_LOGIT}


@dataclass(frozen=True)
class MleFit:
    params: FamilyParams
    covariance: np.ndarray
    loglik: float
    iterations: int
    ridge: float = 0.0


def _objective(family, y, z, params, ridge):
    return float(np.sum(family.log_density(y, z, params))) - 0.5 * ridge * float(params.beta @ params.beta)


def fisher_scoring(family: Family, y, z, params: FamilyParams, ridge=0.0, max_iter=50, tol=1e-8):
    """Maximise the (optionally ridge-penalised) log likelihood in beta.

    Returns:
        tuple: (params, converged flag, iterations).
    """
    current = _objective(family, y, z, params, ridge)
    for iteration in range(1, max_iter + 1):
        grad = family.score_beta(y, z, params) - ridge * params.beta
        info = family.fisher_beta(y, z, params) + ridge * np.eye(family.n_params)
        step = chol_solve(safe_cholesky(info, f"{family.kind.value} information"), grad)
        scale = 1.0
        while scale > 1e-6:
            trial = params.with_beta(params.beta + scale * step)
            value = _objective(family, y, z, trial, ridge)
            if np.isfinite(value) and value >= current - 1e-12:
                break
            scale *= 0.5
        else:
            return params, False, iteration
        params, current = trial, value
        if np.max(np.abs(scale * step)) < tol * (1.0 + np.max(np.abs(params.beta))):
            return params, True, iteration
    return params, False, max_iter


def _fit_kappa(family, y, z, params):
    """Profile the negative binomial overdispersion on the log scale."""

    def negloglik(log_kappa):
        trial = FamilyParams(params.beta, phi=float(np.exp(log_kappa)))
        return -float(np.sum(family.log_density(y, z, trial)))

    result = optimize.minimize_scalar(negloglik, bounds=(-18.0, 5.0), method="bounded")
    return float(np.exp(result.x))


def _separated(family, y, z, params) -> bool:
    if family.kind not in CATEGORICAL:
        return False
    fitted = np.exp(family.log_density(y, z, params))
    return bool(np.all(fitted > 1.0 - 1e-6))


def fit_mle(family: Family, y, z, name: str = "visit", ridge: float = 0.0, max_iter: int = 100) -> MleFit:
    """Fit one visit model by maximum likelihood.

    Args:
        family (Family): The visit's regression family.
        y (np.ndarray): Responses.
        z (np.ndarray): Design matrix.
        name (str): Visit name used in error messages.
        ridge (float): Optional L2 penalty on beta.
        max_iter (int): Fisher-scoring iteration cap.

    Returns:
        MleFit: Estimates with the inverse information as covariance.

    Raises:
        SeparationError: The fitted categorical model reproduces the data exactly.
        ConvergenceError: Scoring did not converge.
    """
    y = np.asarray(y, dtype=float)
    z = np.atleast_2d(np.asarray(z, dtype=float))
    params = family.initial_params()
    if family.kind == FamilyKind.NORMAL:
        beta, *_ = np.linalg.lstsq(z, y, rcond=None)
        resid = y - z @ beta
        dof = max(y.shape[0] - z.shape[1], 1)
        params = FamilyParams(beta, phi=dof / max(float(resid @ resid), 1e-12))

    total = 0
    for _ in range(5 if family.kind == FamilyKind.NEG_BINOMIAL else 1):
        params, converged, iterations = fisher_scoring(family, y, z, params, ridge, max_iter)
        total += iterations
        if family.kind == FamilyKind.NEG_BINOMIAL:
            params = FamilyParams(params.beta, phi=_fit_kappa(family, y, z, params))

    if _separated(family, y, z, params):
        raise SeparationError(name)
    if not converged:
        if family.kind in CATEGORICAL and np.max(np.abs(family.linear_predictor(z, params))) > 25:
            raise SeparationError(name)
        raise ConvergenceError(name, f"{total} scoring iterations")

    info = family.fisher_beta(y, z, params) + ridge * np.eye(family.n_params)
    try:
        covariance = chol_inverse(safe_cholesky(info, f"{name} information"))
    except DecompositionError:
        raise ConvergenceError(name, "singular information at the estimate")
    logger.debug("MLE for %s converged in %d iterations", name, total)
    return MleFit(params, covariance, _objective(family, y, z, params, ridge), total, ridge)
