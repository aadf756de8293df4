# Licensed under the MIT License.

"""Cholesky-based linear algebra with a logged ridge fallback."""

import logging

import numpy as np
from scipy import linalg

from mdalab.utils.status import DecompositionError

logger = logging.getLogger(__name__)

RIDGE = 1e-8


def safe_cholesky(matrix: np.ndarray, what: str = "matrix", ridge: float = RIDGE) -> np.ndarray:
    """Lower Cholesky factor of a symmetric matrix.

    A near-singular matrix is retried once with ``ridge`` added to the diagonal.

    Raises:
        DecompositionError: if the matrix is not positive definite even after the ridge.
    """
    matrix = 0.5 * (matrix + matrix.T)
    try:
        return linalg.cholesky(matrix, lower=True)
    except linalg.LinAlgError:
        pass
    logger.warning("%s is near singular; adding ridge %.1e to the diagonal", what, ridge)
    try:
        return linalg.cholesky(matrix + ridge * np.eye(matrix.shape[0]), lower=True)
    except linalg.LinAlgError as exc:
        raise DecompositionError(what) from exc


def is_positive_definite(matrix: np.ndarray) -> bool:
    try:
        linalg.cholesky(0.5 * (matrix + matrix.T), lower=True)
    except linalg.LinAlgError:
        return False
    return True


def chol_solve(factor: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``A x = rhs`` given the lower Cholesky factor of ``A``."""
    return linalg.cho_solve((factor, True), rhs)


def chol_inverse(factor: np.ndarray) -> np.ndarray:
    return linalg.cho_solve((factor, True), np.eye(factor.shape[0]))


def chol_logdet(factor: np.ndarray) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(factor))))


def mvn_logpdf_prec(x: np.ndarray, mean: np.ndarray, factor: np.ndarray) -> float:
    """Gaussian log density parameterised by the Cholesky factor of its precision.

    Constant terms are dropped; only differences of this quantity are used.
    """
    delta = x - mean
    quad = float(delta @ factor @ factor.T @ delta)
    return 0.5 * chol_logdet(factor) - 0.5 * quad


def sample_mvn_prec(mean: np.ndarray, factor: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw from N(mean, P^{-1}) where ``factor`` is the lower Cholesky factor of P."""
    noise = rng.standard_normal(mean.shape[0])
    return mean + linalg.solve_triangular(factor.T, noise, lower=False)
