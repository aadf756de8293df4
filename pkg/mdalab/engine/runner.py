# Licensed under the MIT License.

"""Run several MDA chains, possibly in parallel, and pool their retained draws."""

import logging
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from mdalab.data.dataset import Dataset
from mdalab.engine.diagnostics import summarize
from mdalab.engine.mda import MdaChain
from mdalab.engine.spec import McmcConfig, ModelSpec
from mdalab.engine.state import ParameterDraw
from mdalab.samplers.rng import RngStream
from mdalab.utils.parallel import map_tasks

logger = logging.getLogger(__name__)


@dataclass
class MdaResult:
    draws: list[ParameterDraw]
    diagnostics: dict = field(default_factory=dict)


def split_draws(total: int, chains: int) -> list[int]:
    """Chain-major split; earlier chains take the remainder."""
    base, extra = divmod(total, chains)
    return [base + (1 if c < extra else 0) for c in range(chains)]


def _run_chain(task, dataset, spec, cfg, stream):
    chain, draws = task
    runner = MdaChain(dataset, spec, cfg, stream, chain)
    retained = list(runner.run(draws))
    return retained, runner.state.acceptance()


def run_chains(dataset: Dataset, spec: ModelSpec, cfg: McmcConfig, workers: int | None = 1) -> MdaResult:
    """Run ``cfg.chains`` chains and return ``cfg.draws`` draws in chain-major order."""
    stream = RngStream(cfg.seed)
    tasks = [(c, n) for c, n in enumerate(split_draws(cfg.draws, cfg.chains)) if n > 0]
    logger.info("Running %d chain(s) for %d draws", len(tasks), cfg.draws)
    outputs = map_tasks(partial(_run_chain, dataset=dataset, spec=spec, cfg=cfg, stream=stream), tasks, workers)
    draws = [draw for retained, _ in outputs for draw in retained]
    traces = [np.array([d.vector() for d in retained]) for retained, _ in outputs if retained]
    acceptance = {}
    for c, (_, rates) in enumerate(outputs):
        acceptance.update({f"chain{c}.{key}": rate for key, rate in rates.items()})
    return MdaResult(draws, summarize(traces, acceptance))
