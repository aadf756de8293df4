# Licensed under the MIT License.

"""A small simulated trial with a handful of MDA draws, shared by the controlled tests."""

from functools import lru_cache

from mdalab.analysis.scenarios import simulate_scenario
from mdalab.data.missingness import sort_monotone
from mdalab.engine.runner import run_chains
from mdalab.engine.spec import McmcConfig, ModelSpec, resolve_model


@lru_cache(maxsize=None)
def trial(n=300, seed=1, draws=4):
    dataset, _ = sort_monotone(simulate_scenario(1, n, seed))
    cfg = McmcConfig(burn_in=20, thin=2, draws=draws, seed=seed)
    result = run_chains(dataset, ModelSpec(), cfg, workers=1)
    return dataset, resolve_model(dataset, ModelSpec()), result.draws
