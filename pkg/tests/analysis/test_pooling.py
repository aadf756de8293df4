# Licensed under the MIT License.

import json
import tempfile
import unittest
from pathlib import Path

import numpy as np
from scipy import stats

from mdalab.analysis.pooling import DF_CAP, rubin_pool, significance_band
from mdalab.utils.status import ConfigurationError


class TestRubinPool(unittest.TestCase):
    def test_two_imputations(self):
        pooled = rubin_pool([[1.0], [3.0]], [[1.0], [1.0]], ["g"])
        row = pooled.row("g")
        self.assertEqual(row["estimate"], 2.0)
        self.assertEqual(row["within"], 1.0)
        self.assertEqual(row["between"], 2.0)
        self.assertEqual(row["total"], 4.0)
        self.assertAlmostEqual(row["df"], (1 + 1 / 3) ** 2)
        self.assertAlmostEqual(row["p"], 2 * stats.t.sf(1.0, (1 + 1 / 3) ** 2))

    def test_identical_estimates_cap_df(self):
        pooled = rubin_pool([[0.5, 2.0]] * 4, [[0.25, 1.0]] * 4)
        np.testing.assert_array_equal(pooled.between, [0.0, 0.0])
        np.testing.assert_array_equal(pooled.df, [DF_CAP, DF_CAP])
        np.testing.assert_allclose(pooled.p, 2 * stats.norm.sf(np.abs(pooled.t)), rtol=1e-6)
        self.assertEqual(pooled.names, ["b0", "b1"])

    def test_single_imputation(self):
        pooled = rubin_pool([[1.5]], [[0.25]], ["g"])
        self.assertFalse(pooled.between_defined)
        self.assertTrue(np.isnan(pooled.between[0]))
        self.assertEqual(pooled.total[0], 0.25)
        self.assertEqual(pooled.df[0], np.inf)
        self.assertAlmostEqual(pooled.p[0], 2 * stats.norm.sf(3.0))

    def test_single_imputation_json(self):
        pooled = rubin_pool([[1.5]], [[0.25]], ["g"])
        with tempfile.TemporaryDirectory() as tmp:
            path = pooled.to_json(Path(tmp) / "pooled.json")
            payload = json.loads(path.read_text())
        self.assertEqual(payload["m"], 1)
        self.assertIsNone(payload["coefficients"][0]["between"])
        self.assertIsNone(payload["coefficients"][0]["df"])

    def test_invalid_input(self):
        with self.assertRaises(ConfigurationError):
            rubin_pool([], [])
        with self.assertRaises(ConfigurationError):
            rubin_pool([[1.0, 2.0]], [[1.0]])
        with self.assertRaises(ConfigurationError):
            rubin_pool([[1.0]], [[1.0]], ["g"]).row("h")


class TestSignificanceBand(unittest.TestCase):
    def test_bands(self):
        cases = {0.00005: "<0.0001", 0.0005: "<0.001", 0.005: "<0.01", 0.04: "<0.05", 0.05: "ns", 0.7: "ns"}
        for p, band in cases.items():
            self.assertEqual(significance_band(p), band, p)


if __name__ == "__main__":
    unittest.main()
