# Licensed under the MIT License.

"""FCS-MNAR: FCS for the intermittent gaps, then controlled imputation after dropout.

Each imputation restarts from fresh fills on its own stream, burns in the
conditional sweeps, draws the sequential-model parameters from the resulting
monotone data and hands them to the dropout mechanism.
"""

import logging
from functools import partial

import numpy as np
import pandas as pd

from mdalab.controlled.mechanism import MechanismSpec, generate_imputations
from mdalab.data.dataset import Dataset
from mdalab.data.missingness import classify_missingness, is_monotone_sorted, pattern_counts
from mdalab.engine.mda import initial_fills
from mdalab.engine.spec import ModelSpec, VisitDesign, resolve_model
from mdalab.engine.state import ParameterDraw
from mdalab.fcs.spec import FcsModelSpec, resolve_conditionals
from mdalab.fcs.sweep import draw_parameters, fcs_sweep
from mdalab.models.base import FamilyKind, FamilyParams
from mdalab.samplers.mh import AcceptanceTracker
from mdalab.samplers.rng import PURPOSE_FCS, RngStream
from mdalab.skewt.gibbs import gibbs_cycle, init_skewt_state
from mdalab.utils.parallel import map_tasks
from mdalab.utils.status import ConfigurationError

logger = logging.getLogger(__name__)


def draw_sequential(
    dataset: Dataset, designs: list[VisitDesign], y: np.ndarray, skew_cycles: int, rng: np.random.Generator
) -> tuple[FamilyParams, ...]:
    """One parameter draw per visit from the monotone completed data."""
    n_counts = pattern_counts(dataset.s, dataset.p)
    full = np.hstack([dataset.x, y])
    params = []
    for design in designs:
        n_j = int(n_counts[design.index])
        z = design.matrix(full[:n_j])
        yj = y[:n_j, design.index]
        if design.is_skew:
            state = init_skewt_state(yj, z, design.hyper, rng, skew_normal=design.family.kind == FamilyKind.SKEW_NORMAL)
            tracker = AcceptanceTracker()
            for _ in range(skew_cycles):
                state = gibbs_cycle(state, yj, z, design.hyper, rng, tracker, adapt=True)
            params.append(state.params)
        else:
            params.append(draw_parameters(design.family, yj, z, design.name, rng))
    return tuple(params)


def _one_imputation(k, dataset, conditionals, designs, fcs, seed):
    rng = RngStream(seed).child(PURPOSE_FCS, k).generator()
    partition = classify_missingness(dataset)
    y = initial_fills(dataset, partition, rng)
    for _ in range(fcs.iterations):
        y = fcs_sweep(dataset, y, conditionals, partition, rng)
    params = draw_sequential(dataset, designs, y, fcs.skew_cycles, rng)
    return ParameterDraw(params=params, y=y, chain=k, iteration=fcs.iterations)


def fcs_draws(
    dataset: Dataset, fcs: FcsModelSpec, model: ModelSpec, m: int, seed: int, workers: int | None = 1
) -> list[ParameterDraw]:
    """m independent (parameters, intermittent-completed data) pairs."""
    if m < 1:
        raise ConfigurationError("number of imputations must be at least 1", field="mcmc.draws")
    if not is_monotone_sorted(dataset):
        raise ConfigurationError("subjects must be sorted by descending dropout pattern")
    conditionals = resolve_conditionals(dataset, fcs)
    designs = resolve_model(dataset, model)
    logger.info("FCS: %d imputations, %d sweeps each", m, fcs.iterations)
    func = partial(_one_imputation, dataset=dataset, conditionals=conditionals, designs=designs, fcs=fcs, seed=seed)
    return map_tasks(func, range(m), workers)


def fcs_mnar_pipeline(
    dataset: Dataset,
    fcs: FcsModelSpec,
    model: ModelSpec,
    mechanism: MechanismSpec,
    m: int,
    seed: int,
    workers: int | None = 1,
    restore: np.ndarray | None = None,
) -> list[pd.DataFrame]:
    draws = fcs_draws(dataset, fcs, model, m, seed, workers)
    return generate_imputations(draws, dataset, resolve_model(dataset, model), mechanism, seed, workers, restore)
