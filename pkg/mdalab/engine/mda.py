# Licensed under the MIT License.

"""Monotone data augmentation.

Each iteration draws every visit's parameters from the monotone-data posterior,
then re-imputes the intermittent discrete cells by enumeration and the
intermittent continuous cells by a Newton-type Metropolis-Hastings move.
Post-dropout cells are never touched inside the chain.
"""

import itertools
import logging
from dataclasses import replace

import numpy as np
from scipy import stats

from mdalab.data.dataset import Dataset
from mdalab.data.missingness import MissingnessPartition, classify_missingness, is_monotone_sorted
from mdalab.engine.spec import McmcConfig, ModelSpec, VisitDesign, resolve_model
from mdalab.engine.state import ChainState, ParameterDraw
from mdalab.models.base import FamilyKind, FamilyParams, LinearPredictorContext
from mdalab.models.mle import fisher_scoring
from mdalab.paths import config
from mdalab.samplers.mh import mh_update_beta, rw_mh_log_scale
from mdalab.samplers.normal_gamma import draw_normal_gamma
from mdalab.samplers.rng import PURPOSE_CHAIN, RngStream
from mdalab.skewt.gibbs import gibbs_cycle, init_skewt_state
from mdalab.utils.linalg import chol_solve, is_positive_definite, mvn_logpdf_prec, safe_cholesky, sample_mvn_prec
from mdalab.utils.status import ConfigurationError, DataError, DecompositionError, NumericalError

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = int(config.get("enumeration_limit", 1_000_000))
LOG_KAPPA_PRIOR_SD = 10.0


class ChainContext:
    """Read-only inputs shared by all steps of one chain."""

    def __init__(self, dataset: Dataset, designs: list[VisitDesign]):
        if not is_monotone_sorted(dataset):
            raise ConfigurationError("subjects must be sorted by descending dropout pattern")
        self.dataset = dataset
        self.designs = designs
        self.partition = classify_missingness(dataset)
        self.n_counts = self.partition.n_counts
        self.q = dataset.q
        self.discrete_rows = self.partition.intermittent_rows("discrete")
        self.continuous_rows = self.partition.intermittent_rows("continuous")
        observed = np.where(dataset.observed, dataset.y, np.nan)
        with np.errstate(invalid="ignore"):
            spread = np.nanstd(observed, axis=0) if dataset.n else np.ones(dataset.p)
        self.visit_scale = np.where(np.isfinite(spread) & (spread > 0), spread, 1.0)
        for design in designs:
            n_j = int(self.n_counts[design.index])
            if design.family.kind == FamilyKind.NORMAL or design.is_skew:
                if n_j <= design.n_terms + 1:
                    raise ConfigurationError(
                        f"only {n_j} subjects reach visit {design.name!r}; need more than {design.n_terms + 1}",
                        field=f"model.visits.{design.name}",
                    )
            elif n_j == 0:
                raise ConfigurationError(f"no subject reaches visit {design.name!r}", field=f"model.visits.{design.name}")

    def full(self, y: np.ndarray, rows=slice(None)) -> np.ndarray:
        return np.hstack([self.dataset.x[rows], y[rows]])


def initial_fills(dataset: Dataset, partition: MissingnessPartition, rng: np.random.Generator) -> np.ndarray:
    """Continuous gaps start at the visit mean, discrete gaps at an empirical draw."""
    y = np.array(dataset.y, copy=True)
    for j in range(dataset.p):
        if not dataset.observed[:, j].any() and any(j in sub.intermittent for sub in partition.subjects):
            raise DataError(f"visit {dataset.visit_names[j]!r} has gaps but no observed values")
    for i, sub in enumerate(partition.subjects):
        for j in sub.continuous:
            y[i, j] = np.nanmean(dataset.y[dataset.observed[:, j], j])
        for j in sub.discrete:
            pool = dataset.y[dataset.observed[:, j], j]
            y[i, j] = rng.choice(pool)
    return y


def initial_state(ctx: ChainContext, y: np.ndarray, rng: np.random.Generator) -> ChainState:
    params, skew = [], {}
    for design in ctx.designs:
        n_j = int(ctx.n_counts[design.index])
        z = design.matrix(ctx.full(y, slice(0, n_j)))
        yj = y[:n_j, design.index]
        family = design.family
        if design.is_skew:
            state = init_skewt_state(yj, z, design.hyper, rng, skew_normal=family.kind == FamilyKind.SKEW_NORMAL)
            skew[design.index] = state
            params.append(state.params)
        elif family.kind == FamilyKind.NORMAL:
            beta, *_ = np.linalg.lstsq(z, yj, rcond=None)
            params.append(FamilyParams(beta, phi=1.0 / max(float(np.var(yj - z @ beta)), 1e-8)))
        else:
            start = family.initial_params()
            try:
                start, _, _ = fisher_scoring(family, yj, z, start, ridge=1e-4, max_iter=25)
            except NumericalError:
                logger.warning("Warm start failed for %s; starting from zero", design.name)
            params.append(start)
    return ChainState(params=params, y=y, skew=skew)


def step_A1(state: ChainState, ctx: ChainContext, rngs: list[np.random.Generator], adapt: bool = False) -> ChainState:
    """Draw every visit's parameters given the current monotone data."""
    for design in ctx.designs:
        j = design.index
        n_j = int(ctx.n_counts[j])
        rng = rngs[j]
        z = design.matrix(ctx.full(state.y, slice(0, n_j)))
        yj = state.y[:n_j, j]
        family = design.family
        if design.is_skew:
            skew = gibbs_cycle(state.skew[j], yj, z, design.hyper, rng, state.tracker(f"{design.name}.nu"), adapt)
            state.skew[j] = skew
            state.params[j] = skew.params
        elif family.kind == FamilyKind.NORMAL:
            augmented = np.hstack([z, yj[:, None]])
            beta, gamma = draw_normal_gamma(augmented.T @ augmented, n_j, rng)
            state.params[j] = FamilyParams(beta, phi=gamma)
        else:
            params, accepted = mh_update_beta(family, yj, z, state.params[j], design.prior, rng)
            state.tracker(f"{design.name}.beta").record(accepted)
            if family.kind == FamilyKind.NEG_BINOMIAL:
                params = _update_kappa(state, design, yj, z, params, rng, adapt)
            state.params[j] = params
    return state


def _update_kappa(state, design, y, z, params, rng, adapt):
    family = design.family

    def log_target(log_kappa):
        trial = replace(params, phi=float(np.exp(log_kappa)))
        return float(np.sum(family.log_density(y, z, trial))) + stats.norm.logpdf(log_kappa, 0.0, LOG_KAPPA_PRIOR_SD)

    tracker = state.tracker(f"{design.name}.kappa")
    kappa, accepted = rw_mh_log_scale(params.phi, log_target, tracker.tuning, rng)
    tracker.record(accepted, adapt)
    return replace(params, phi=kappa)


def _subject_loglik(state, ctx, i, rows_full, first, last):
    """Sum of visit log densities first..last (inclusive) for candidate rows of subject i."""
    total = np.zeros(rows_full.shape[0])
    for design in ctx.designs[first : last + 1]:
        offset, weight = state.latent_offset(design.index, i)
        z = design.matrix(rows_full)
        total += design.family.log_density(rows_full[:, design.column], z, state.params[design.index], offset, weight)
    return total


def impute_discrete_intermittent(i: int, state: ChainState, ctx: ChainContext, rng: np.random.Generator) -> ChainState:
    """Redraw subject i's intermittent discrete cells jointly from their full conditional."""
    cells = list(ctx.partition.subjects[i].discrete)
    if not cells:
        return state
    last = int(ctx.dataset.s[i]) - 1
    row = ctx.full(state.y, slice(i, i + 1))[0]
    supports = []
    for j in cells:
        design = ctx.designs[j]
        supports.append(design.family.support(design.row(row)[None, :], state.params[j]))
    size = int(np.prod([len(s) for s in supports], dtype=float))
    if size > ENUMERATION_LIMIT:
        raise ConfigurationError(
            f"subject {ctx.dataset.ids[i]} has {size} joint outcomes for its discrete gaps; "
            "split these cells into smaller blocks or use fewer categories",
            field="model",
        )
    combos = np.array(list(itertools.product(*supports)), dtype=float)
    candidates = np.repeat(row[None, :], combos.shape[0], axis=0)
    candidates[:, [ctx.q + j for j in cells]] = combos
    logw = _subject_loglik(state, ctx, i, candidates, min(cells), last)
    weights = np.exp(logw - np.max(logw))
    cumulative = np.cumsum(weights)
    pick = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
    state.y[i, cells] = combos[min(pick, combos.shape[0] - 1)]
    return state


def _newton_terms(state, ctx, i, row, columns, first, last):
    """Log target, gradient and curvature of subject i's continuous gaps at ``row``."""
    logt, grad = 0.0, np.zeros(len(columns))
    curvature = np.zeros((len(columns), len(columns)))
    for design in ctx.designs[first : last + 1]:
        offset, weight = state.latent_offset(design.index, i)
        params = state.params[design.index]
        z = design.row(row)
        response = columns.index(design.column) if design.column in columns else None
        lp_ctx = LinearPredictorContext(z, design.jacobian(row, columns), response)
        y = row[design.column]
        family = design.family
        logt += float(family.log_density(np.array([y]), z[None, :], params, offset, weight)[0])
        grad += family.grad_yc(y, lp_ctx, params, offset, weight)
        curvature += family.hess_yc(y, lp_ctx, params, offset, weight)
    return logt, grad, curvature


def _newton_move(state, ctx, i, columns, first, last, rng):
    """One MH move of the given gap columns; None when the curvature is not positive definite."""
    row = ctx.full(state.y, slice(i, i + 1))[0]
    logt, grad, curvature = _newton_terms(state, ctx, i, row, columns, first, last)
    if not is_positive_definite(curvature):
        return None
    factor = safe_cholesky(curvature, "missing-value curvature")
    current = row[columns]
    forward_mean = current + chol_solve(factor, grad)
    proposal = sample_mvn_prec(forward_mean, factor, rng)
    u = rng.random()
    candidate_row = row.copy()
    candidate_row[columns] = proposal
    logt_new, grad_new, curvature_new = _newton_terms(state, ctx, i, candidate_row, columns, first, last)
    if not (np.isfinite(logt_new) and is_positive_definite(curvature_new)):
        return False
    reverse_factor = safe_cholesky(curvature_new, "missing-value curvature")
    reverse_mean = proposal + chol_solve(reverse_factor, grad_new)
    log_ratio = (
        logt_new
        + mvn_logpdf_prec(current, reverse_mean, reverse_factor)
        - logt
        - mvn_logpdf_prec(proposal, forward_mean, factor)
    )
    if np.log(u) < log_ratio:
        state.y[i, [c - ctx.q for c in columns]] = proposal
        return True
    return False


def _random_walk_move(state, ctx, i, column, block, last, rng, adapt):
    """Random-walk move of one gap inside a block whose curvature is not positive definite.

    Candidates where the block curvature is positive definite belong to the Newton
    kernel's region and are rejected.
    """
    j = column - ctx.q
    tracker = state.tracker("y_c.random_walk")
    row = ctx.full(state.y, slice(i, i + 1))[0]
    candidate = row.copy()
    candidate[column] = row[column] + tracker.tuning.c * ctx.visit_scale[j] * rng.standard_normal()
    log_ratio = _subject_loglik(state, ctx, i, candidate[None, :], j, last)[0] - _subject_loglik(
        state, ctx, i, row[None, :], j, last
    )[0]
    u = rng.random()
    _, _, curvature = _newton_terms(state, ctx, i, candidate, block, min(block) - ctx.q, last)
    accepted = bool(np.log(u) < log_ratio) and not is_positive_definite(curvature)
    if accepted:
        state.y[i, j] = candidate[column]
    tracker.record(accepted, adapt)
    return accepted


def _coupling_blocks(ctx, columns) -> list[list[int]]:
    """Greedy split of the gap columns so that no block holds an interacting pair."""
    pairs = set()
    for design in ctx.designs:
        pairs |= design.coupled_pairs(columns)
    if not pairs:
        return [list(columns)]
    blocks: list[list[int]] = []
    for column in columns:
        for block in blocks:
            if not any((column, other) in pairs or (other, column) in pairs for other in block):
                block.append(column)
                break
        else:
            blocks.append([column])
    return blocks


def impute_continuous_intermittent(
    i: int, state: ChainState, ctx: ChainContext, rng: np.random.Generator, adapt: bool = False
) -> tuple[ChainState, bool]:
    """Metropolis-Hastings update of subject i's intermittent continuous cells.

    The proposal is N(y + V^{-1} g, V^{-1}) with g and V the gradient and curvature
    summed over the subject's visits from the first gap to the last observation.
    Interacting gaps are split into blocks; a block whose curvature is not positive
    definite falls back to one-at-a-time random-walk moves that stay in that region.
    """
    cells = list(ctx.partition.subjects[i].continuous)
    if not cells:
        return state, False
    last = int(ctx.dataset.s[i]) - 1
    columns = [ctx.q + j for j in cells]
    blocks = _coupling_blocks(ctx, columns)
    if len(blocks) > 1:
        logger.debug("Subject %s: splitting %d gaps into %d blocks", ctx.dataset.ids[i], len(columns), len(blocks))
    accepted_any = False
    for block in blocks:
        first = min(block) - ctx.q
        outcome = _newton_move(state, ctx, i, block, first, last, rng)
        if outcome is None:
            logger.warning("Subject %s: curvature not positive definite; random-walk fallback", ctx.dataset.ids[i])
            for column in block:
                accepted_any |= _random_walk_move(state, ctx, i, column, block, last, rng, adapt)
            continue
        state.tracker("y_c").record(outcome)
        accepted_any |= outcome
    return state, accepted_any


class MdaChain:
    """One monotone-data-augmentation chain over a monotone-sorted dataset."""

    def __init__(self, dataset: Dataset, spec: ModelSpec, cfg: McmcConfig, stream: RngStream, chain: int = 0):
        self.cfg = cfg
        self.chain = chain
        self.ctx = ChainContext(dataset, resolve_model(dataset, spec))
        chain_stream = stream.child(PURPOSE_CHAIN, chain)
        self.visit_rngs = [chain_stream.child(0, j).generator() for j in range(dataset.p)]
        self.impute_rng = chain_stream.child(1).generator()
        init_rng = chain_stream.child(2).generator()
        self.state = initial_state(self.ctx, initial_fills(dataset, self.ctx.partition, init_rng), init_rng)

    def iterate(self, adapt: bool) -> None:
        state, ctx = self.state, self.ctx
        step_A1(state, ctx, self.visit_rngs, adapt)
        for i in ctx.discrete_rows:
            impute_discrete_intermittent(i, state, ctx, self.impute_rng)
        for i in ctx.continuous_rows:
            impute_continuous_intermittent(i, state, ctx, self.impute_rng, adapt)
        state.iteration += 1
        if self.cfg.debug:
            self._check_observed()

    def _check_observed(self) -> None:
        observed = self.ctx.dataset.observed
        if not np.array_equal(self.state.y[observed], self.ctx.dataset.y[observed]):
            raise NumericalError(f"observed cells changed at iteration {self.state.iteration}")

    def run(self, draws: int | None = None):
        """Burn in, then yield every thin-th state until ``draws`` states are emitted."""
        draws = self.cfg.draws if draws is None else draws
        for _ in range(self.cfg.burn_in):
            self.iterate(adapt=True)
        logger.info("Chain %d finished %d burn-in iterations", self.chain, self.cfg.burn_in)
        for _ in range(draws):
            for _ in range(self.cfg.thin):
                self.iterate(adapt=False)
            yield ParameterDraw(
                params=tuple(self.state.params),
                y=self.state.y.copy(),
                chain=self.chain,
                iteration=self.state.iteration,
            )


def run_mda(dataset: Dataset, spec: ModelSpec, cfg: McmcConfig, stream: RngStream | None = None, chain: int = 0, draws=None):
    """Stream of retained (parameters, intermittent-completed data) states."""
    stream = RngStream(cfg.seed) if stream is None else stream
    try:
        yield from MdaChain(dataset, spec, cfg, stream, chain).run(draws)
    except DecompositionError:
        logger.error("Linear algebra failure in chain %d", chain)
        raise
