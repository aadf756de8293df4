# Licensed under the MIT License.

"""Simulated two-arm trials with a baseline, one continuous and one binary visit.

Half of the subjects are controls (g = 0). Visit 1 is Normal (scenario 1) or
skew-t (scenario 2) given the baseline and arm; visit 2 is a probit outcome of
the baseline and visit 1. Subjects drop out before visit 1 or before visit 2
with logistic probabilities, and visit 1 of completers is missing 20% of the time.
"""

import logging

import numpy as np
from scipy import special

from mdalab.controlled.mechanism import MechanismKind
from mdalab.data.dataset import Dataset
from mdalab.data.schema import ColumnSchema, VariableKind, VisitType
from mdalab.samplers.rng import PURPOSE_SIMULATION, RngStream
from mdalab.skewt.distribution import sample_skewt
from mdalab.utils.status import ConfigurationError

logger = logging.getLogger(__name__)

SCENARIOS = (1, 2)
INTERMITTENT_RATE = 0.2

TRUE_PARAMETERS = {
    "visit1": {"intercept": 0.5, "y0": 0.5, "g": 1.0, "sd": 1.0},
    "visit1_skew": {"intercept": 0.5 - 2.0 * np.sqrt(2.0 / np.pi), "y0": 0.5, "g": 1.0, "psi": 2.0, "gamma": 1.0, "nu": 10.0},
    "visit2_probit": {"intercept": -0.5, "y0": 0.25, "y1": 0.8},
    "dropout_before_visit1": {"intercept": -3.0, "y0": 0.3},
    "dropout_before_visit2": {"intercept": -2.0, "y0": 0.3, "y1": 1.0},
    "intermittent_rate": INTERMITTENT_RATE,
}


def scenario_schema() -> ColumnSchema:
    return ColumnSchema(
        id_column="id",
        covariates=["y0", "g"],
        visits=[VisitType(name="y1", kind=VariableKind.CONTINUOUS), VisitType(name="y2", kind=VariableKind.BINARY)],
        treatment="g",
    )


def _check(which: int, n: int) -> None:
    if which not in SCENARIOS:
        raise ConfigurationError(f"unknown scenario {which}; choose 1 or 2", field="scenario")
    if n < 0 or n % 2:
        raise ConfigurationError("n must be a non-negative even number", field="n")


def _visit1(which, y0, g, rng):
    if which == 1:
        return 0.5 + 0.5 * y0 + g + rng.standard_normal(y0.size)
    skew = TRUE_PARAMETERS["visit1_skew"]
    mu = skew["intercept"] + 0.5 * y0 + g
    return sample_skewt(mu, skew["psi"], skew["gamma"], skew["nu"], y0.size, rng)


def _visit2(y0, y1, u):
    success = u < special.ndtr(-0.5 + 0.25 * y0 + 0.8 * y1)
    return np.where(success, 1.0, 2.0)


def _generate(which: int, n: int, seed: int):
    rng = RngStream(seed).child(PURPOSE_SIMULATION, which).generator()
    g = np.repeat([0.0, 1.0], n // 2)
    y0 = rng.standard_normal(n)
    y1 = _visit1(which, y0, g, rng)
    y2 = _visit2(y0, y1, rng.random(n))
    u_first, u_second, u_gap = rng.random(n), rng.random(n), rng.random(n)
    s = np.full(n, 2)
    s[u_second < special.expit(0.3 * y0 + y1 - 2.0)] = 1
    s[u_first < special.expit(0.3 * y0 - 3.0)] = 0
    observed = np.column_stack([s >= 1, s >= 2])
    observed[(s == 2) & (u_gap < INTERMITTENT_RATE), 0] = False
    return y0, g, np.column_stack([y1, y2]), observed, s


def _dataset(y0, g, y, observed) -> Dataset:
    n = y0.size
    schema = scenario_schema()
    ids = np.array([str(i + 1) for i in range(n)], dtype=object)
    x = np.column_stack([np.ones(n), y0, g]) if n else np.empty((0, 3))
    return Dataset(schema, ids, x, y if n else np.empty((0, 2)), observed if n else np.empty((0, 2), dtype=bool))


def simulate_scenario(which: int, n: int, seed: int) -> Dataset:
    """Simulated trial with its missingness applied."""
    _check(which, n)
    y0, g, y, observed, _ = _generate(which, n, seed)
    return _dataset(y0, g, y, observed)


def simulate_full_scenario(which: int, n: int, seed: int, mechanism: MechanismKind | str = MechanismKind.MAR):
    """The same trial plus its complete pre-deletion values.

    Under copy-reference truth, post-dropout values of treated subjects are
    regenerated from the control-arm model, so the full data answers the
    estimand the copy-reference imputation targets.
    """
    _check(which, n)
    mechanism = MechanismKind(mechanism)
    if mechanism == MechanismKind.DELTA:
        raise ConfigurationError("full-data truth is defined for mar and copy_reference only", field="mechanism")
    y0, g, y, observed, s = _generate(which, n, seed)
    full = y.copy()
    if mechanism == MechanismKind.COPY_REFERENCE and n:
        rng = RngStream(seed).child(PURPOSE_SIMULATION, which, 1).generator()
        y1_ref = _visit1(which, y0, np.zeros(n), rng)
        u = rng.random(n)
        treated = g == 1
        redo1 = treated & (s == 0)
        full[redo1, 0] = y1_ref[redo1]
        redo2 = treated & (s <= 1)
        full[redo2, 1] = _visit2(y0, full[:, 0], u)[redo2]
    return _dataset(y0, g, y, observed), full
