# Licensed under the MIT License.

import unittest

import numpy as np
import pandas as pd

from mdalab.analysis.scenarios import simulate_scenario
from mdalab.controlled.mechanism import MechanismSpec
from mdalab.data.dataset import Dataset
from mdalab.data.missingness import classify_missingness, sort_monotone
from mdalab.data.schema import ColumnSchema, VisitType
from mdalab.engine.mda import initial_fills
from mdalab.engine.spec import ModelSpec
from mdalab.fcs.pipeline import fcs_draws, fcs_mnar_pipeline
from mdalab.fcs.spec import FcsConditional, FcsModelSpec, resolve_conditionals
from mdalab.fcs.sweep import fcs_sweep
from mdalab.utils.status import ConfigurationError, SeparationError

FCS = FcsModelSpec(iterations=3)


def scenario(n=200, seed=3):
    return sort_monotone(simulate_scenario(1, n, seed))[0]


class TestResolveConditionals(unittest.TestCase):
    def test_default_predictors_exclude_the_visit(self):
        dataset = scenario()
        designs = resolve_conditionals(dataset, FcsModelSpec())
        self.assertEqual(designs[0].predictors, [0, 1, 2, 4])
        self.assertEqual(designs[0].columns_for(1), [0, 1, 2])
        self.assertEqual(designs[1].predictors, [0, 1, 2, 3])

    def test_rejections(self):
        dataset = scenario()
        for spec in (
            FcsModelSpec(conditionals=[FcsConditional(visit="y1", family="skew_t")]),
            FcsModelSpec(conditionals=[FcsConditional(visit="y1", predictors=["y1"])]),
            FcsModelSpec(conditionals=[FcsConditional(visit="y3")]),
            FcsModelSpec(order=["y2"]),
        ):
            with self.assertRaises(ConfigurationError):
                resolve_conditionals(dataset, spec)


class TestSweep(unittest.TestCase):
    def test_only_intermittent_cells_move(self):
        dataset = scenario()
        partition = classify_missingness(dataset)
        rng = np.random.default_rng(4)
        start = initial_fills(dataset, partition, rng)
        swept = fcs_sweep(dataset, start, resolve_conditionals(dataset, FCS), partition, rng)
        gaps = ~dataset.observed & ~np.isnan(start)
        self.assertTrue(gaps.any())
        np.testing.assert_array_equal(swept[dataset.observed], dataset.y[dataset.observed])
        np.testing.assert_array_equal(np.isnan(swept), np.isnan(start))
        self.assertFalse(np.array_equal(swept[gaps], start[gaps]))

    def test_separation_is_reported(self):
        n = 40
        rng = np.random.default_rng(6)
        g = np.repeat([0.0, 1.0], n // 2)
        y = np.column_stack([np.where(g == 1, 1.0, 2.0), rng.standard_normal(n)])
        observed = np.ones((n, 2), dtype=bool)
        observed[::5, 0] = False
        schema = ColumnSchema(
            covariates=["g"], visits=[VisitType(name="y1", kind="binary"), VisitType(name="y2", kind="continuous")]
        )
        dataset = Dataset(schema, np.arange(n).astype(str).astype(object), np.column_stack([np.ones(n), g]), y, observed)
        partition = classify_missingness(dataset)
        start = initial_fills(dataset, partition, rng)
        with self.assertRaises(SeparationError):
            fcs_sweep(dataset, start, resolve_conditionals(dataset, FCS), partition, rng)


class TestPipeline(unittest.TestCase):
    def test_zero_imputations(self):
        with self.assertRaises(ConfigurationError):
            fcs_draws(scenario(), FCS, ModelSpec(), 0, seed=1)

    def test_reproducible(self):
        dataset = scenario()
        first = fcs_draws(dataset, FCS, ModelSpec(), 2, seed=9)
        second = fcs_draws(dataset, FCS, ModelSpec(), 2, seed=9)
        self.assertEqual([d.chain for d in first], [0, 1])
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.y, b.y)
            np.testing.assert_array_equal(a.vector(), b.vector())

    def test_zero_delta_matches_mar(self):
        dataset = scenario()
        mar = fcs_mnar_pipeline(dataset, FCS, ModelSpec(), MechanismSpec(), 2, seed=12)
        delta = fcs_mnar_pipeline(dataset, FCS, ModelSpec(), MechanismSpec.collapsed(0.0, 0.0), 2, seed=12)
        for a, b in zip(mar, delta):
            pd.testing.assert_frame_equal(a, b)
            self.assertFalse(a[["y1", "y2"]].isna().any().any())


if __name__ == "__main__":
    unittest.main()
