# Licensed under the MIT License.

"""One pass of variable-by-variable imputation of the intermittent gaps."""

import logging

import numpy as np

from mdalab.data.dataset import Dataset
from mdalab.data.missingness import MissingnessPartition
from mdalab.fcs.spec import ConditionalDesign
from mdalab.models.base import Family, FamilyKind, FamilyParams
from mdalab.models.mle import fit_mle
from mdalab.models.registry import FamilyRegistry
from mdalab.samplers.normal_gamma import draw_normal_gamma
from mdalab.utils.linalg import safe_cholesky
from mdalab.utils.status import ConvergenceError, DataError, DecompositionError

logger = logging.getLogger(__name__)

RETRY_RIDGE = 1e-4


def fit_with_retry(family: Family, y, z, name: str):
    """MLE fit, retried once with a small ridge when scoring fails numerically."""
    try:
        return fit_mle(family, y, z, name)
    except (ConvergenceError, DecompositionError) as exc:
        logger.warning("Fit of %s failed (%s); retrying with ridge %.0e", name, exc, RETRY_RIDGE)
        return fit_mle(family, y, z, name, ridge=RETRY_RIDGE)


def draw_parameters(family: Family, y, z, name: str, rng: np.random.Generator) -> FamilyParams:
    """Approximate posterior draw for one regression.

    Normal models draw exactly from the flat-prior normal-gamma posterior; every
    other family draws beta from N(MLE, inverse information) with any dispersion
    held at its estimate.
    """
    y = np.asarray(y, dtype=float)
    if family.kind == FamilyKind.NORMAL:
        if y.shape[0] <= z.shape[1]:
            raise DataError(f"visit {name!r} has {y.shape[0]} usable rows for {z.shape[1]} predictors")
        augmented = np.hstack([z, y[:, None]])
        beta, gamma = draw_normal_gamma(augmented.T @ augmented, y.shape[0], rng)
        return FamilyParams(beta, phi=gamma)
    fit = fit_with_retry(family, y, z, name)
    factor = safe_cholesky(fit.covariance, f"{name} covariance")
    beta = fit.params.beta + factor @ rng.standard_normal(family.n_params)
    return fit.params.with_beta(beta)


def _gap_groups(design: ConditionalDesign, dataset: Dataset, partition: MissingnessPartition) -> dict[int, np.ndarray]:
    groups: dict[int, list[int]] = {}
    for i, sub in enumerate(partition.subjects):
        if design.index in sub.intermittent:
            groups.setdefault(int(dataset.s[i]), []).append(i)
    return {pattern: np.array(rows) for pattern, rows in sorted(groups.items())}


def fcs_sweep(
    dataset: Dataset,
    y: np.ndarray,
    designs: list[ConditionalDesign],
    partition: MissingnessPartition,
    rng: np.random.Generator,
    registry: FamilyRegistry | None = None,
) -> np.ndarray:
    """Redraw every intermittent cell once, visit by visit.

    For each visit the gaps are grouped by dropout pattern. A group's model is fitted
    to the subjects that observe the visit and reach the same pattern, so all of its
    predictors are available; post-dropout cells are never read or written.
    """
    registry = registry or FamilyRegistry()
    y = np.array(y, copy=True)
    full = np.hstack([dataset.x, y])
    for design in designs:
        observed = dataset.observed[:, design.index]
        visit_type = dataset.visit_types[design.index]
        for pattern, rows in _gap_groups(design, dataset, partition).items():
            columns = design.columns_for(pattern)
            family = design.family_for(pattern, registry, visit_type)
            fit_rows = observed & (dataset.s >= pattern)
            if not fit_rows.any():
                raise DataError(f"no subject observes visit {design.name!r} at pattern {pattern} or later")
            params = draw_parameters(family, full[fit_rows, design.column], full[np.ix_(fit_rows, columns)], design.name, rng)
            draws = family.sample_response(full[np.ix_(rows, columns)], params, rng)
            full[rows, design.column] = draws
            y[rows, design.index] = draws
    return y
