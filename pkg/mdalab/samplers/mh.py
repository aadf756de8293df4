# Licensed under the MIT License.

"""Metropolis-Hastings kernels: Fisher-scoring proposals for beta, random walks on log scales."""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from mdalab.models.base import Family, FamilyParams
from mdalab.utils.linalg import chol_solve, mvn_logpdf_prec, safe_cholesky, sample_mvn_prec

logger = logging.getLogger(__name__)

BLOCK_THRESHOLD = 30
BLOCK_SIZE = 15


@dataclass(frozen=True)
class MhTuning:
    c: float = 1.0
    window: int = 50
    lower: float = 0.30
    upper: float = 0.70

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("step scale c must be positive")
        if self.window < 1:
            raise ValueError("window must be at least 1")


def adapt_tuning(tuning: MhTuning, history) -> MhTuning:
    """Rescale the step after a window of burn-in proposals.

    Acceptance above the band widens the step by 10%, below it shrinks it by 10%.
    """
    history = np.asarray(history, dtype=float)
    if history.size == 0:
        return tuning
    rate = float(history[-tuning.window :].mean())
    if rate > tuning.upper:
        return replace(tuning, c=tuning.c * 1.1)
    if rate < tuning.lower:
        return replace(tuning, c=tuning.c * 0.9)
    return tuning


@dataclass
class AcceptanceTracker:
    """Running acceptance record of one kernel; the window feeds ``adapt_tuning``."""

    tuning: MhTuning = field(default_factory=MhTuning)
    proposed: int = 0
    accepted: int = 0
    recent: list = field(default_factory=list)

    def record(self, accepted: bool, adapt: bool = False) -> None:
        self.proposed += 1
        self.accepted += int(accepted)
        if not adapt:
            return
        self.recent.append(bool(accepted))
        if len(self.recent) >= self.tuning.window:
            self.tuning = adapt_tuning(self.tuning, self.recent)
            self.recent = []

    @property
    def rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else float("nan")


@dataclass(frozen=True)
class GaussianPrior:
    """N(mean, precision^{-1}) prior on a coefficient vector."""

    mean: np.ndarray
    precision: np.ndarray

    @classmethod
    def vague(cls, dim: int, precision: float = 1e-8) -> "GaussianPrior":
        return cls(np.zeros(dim), precision * np.eye(dim))

    def logpdf(self, beta: np.ndarray) -> float:
        delta = beta - self.mean
        return -0.5 * float(delta @ self.precision @ delta)


def parameter_blocks(dim: int) -> list[np.ndarray]:
    if dim <= BLOCK_THRESHOLD:
        return [np.arange(dim)]
    n_blocks = int(np.ceil(dim / BLOCK_SIZE))
    return [np.asarray(block) for block in np.array_split(np.arange(dim), n_blocks)]


def _proposal(family, y, z, params, prior, block, offset, weight):
    """Mean and precision factor of the Fisher-scoring proposal for one block."""
    beta = params.beta
    grad = family.score_beta(y, z, params, offset, weight) + prior.precision @ (prior.mean - beta)
    info = family.fisher_beta(y, z, params, offset, weight) + prior.precision
    factor = safe_cholesky(info[np.ix_(block, block)], f"{family.kind.value} information plus prior")
    return beta[block] + chol_solve(factor, grad[block]), factor


def _log_posterior(family, y, z, params, prior, offset, weight):
    return float(np.sum(family.log_density(y, z, params, offset, weight))) + prior.logpdf(params.beta)


def mh_update_beta(
    family: Family,
    y,
    z,
    params: FamilyParams,
    prior: GaussianPrior,
    rng: np.random.Generator,
    offset=0.0,
    weight=1.0,
) -> tuple[FamilyParams, bool]:
    """One Metropolis-Hastings move of beta with a Fisher-scoring proposal.

    The candidate is drawn from N[beta + S(U(beta) + R(v - beta)), S] with
    S = [I(beta) + R]^{-1}; the reverse proposal is evaluated at the candidate.
    Parameter vectors longer than 30 are moved in contiguous blocks of at most 15.
    The proposal scale is S itself, so this kernel takes no ``MhTuning``; only the
    random-walk kernels are tuned.

    Returns:
        tuple: Updated parameters and whether any block moved.
    """
    moved = False
    current_logpost = _log_posterior(family, y, z, params, prior, offset, weight)
    for block in parameter_blocks(family.n_params):
        forward_mean, forward_factor = _proposal(family, y, z, params, prior, block, offset, weight)
        candidate_block = sample_mvn_prec(forward_mean, forward_factor, rng)
        beta = params.beta.copy()
        beta[block] = candidate_block
        candidate = params.with_beta(beta)
        candidate_logpost = _log_posterior(family, y, z, candidate, prior, offset, weight)
        if not np.isfinite(candidate_logpost):
            rng.random()
            continue
        reverse_mean, reverse_factor = _proposal(family, y, z, candidate, prior, block, offset, weight)
        log_ratio = (
            candidate_logpost
            + mvn_logpdf_prec(params.beta[block], reverse_mean, reverse_factor)
            - current_logpost
            - mvn_logpdf_prec(candidate_block, forward_mean, forward_factor)
        )
        if np.log(rng.random()) < log_ratio:
            params, current_logpost, moved = candidate, candidate_logpost, True
    return params, moved


def rw_mh_lognu(nu: float, loglik, log_prior, nu_l: float, nu_m: float, tuning: MhTuning, rng: np.random.Generator):
    """Random-walk move on log(nu - nu_l); candidates above nu_m are rejected.

    The acceptance ratio carries the Jacobian (nu* - nu_l) / (nu - nu_l).
    """
    if not nu_l < nu <= nu_m:
        raise ValueError(f"nu={nu} outside ({nu_l}, {nu_m}]")
    log_excess = np.log(nu - nu_l) + tuning.c * rng.standard_normal()
    u = rng.random()
    candidate = nu_l + np.exp(log_excess)
    if candidate > nu_m:
        return nu, False
    log_ratio = (
        loglik(candidate)
        + log_prior(candidate)
        - loglik(nu)
        - log_prior(nu)
        + log_excess
        - np.log(nu - nu_l)
    )
    if np.log(u) < log_ratio:
        return float(candidate), True
    return nu, False


def rw_mh_log_scale(value: float, log_target, tuning: MhTuning, rng: np.random.Generator):
    """Random-walk move on log(value); ``log_target`` is a density in log(value)."""
    current = np.log(value)
    proposal = current + tuning.c * rng.standard_normal()
    if np.log(rng.random()) < log_target(proposal) - log_target(current):
        return float(np.exp(proposal)), True
    return value, False
