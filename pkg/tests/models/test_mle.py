# Licensed under the MIT License.

import unittest

import numpy as np

from mdalab.models.base import FamilyKind
from mdalab.models.mle import fit_mle
from mdalab.models.registry import FamilyRegistry
from mdalab.utils.status import SeparationError


def design(rng, n, r=2):
    return np.column_stack([np.ones(n), rng.standard_normal((n, r - 1))])


class TestFitMle(unittest.TestCase):
    def setUp(self):
        self.registry = FamilyRegistry()
        self.rng = np.random.default_rng(31)

    def test_normal_matches_least_squares(self):
        z = design(self.rng, 200, 3)
        y = z @ np.array([1.0, -0.5, 2.0]) + self.rng.standard_normal(200)
        fit = fit_mle(self.registry.get_family(FamilyKind.NORMAL, 3), y, z)
        expected, *_ = np.linalg.lstsq(z, y, rcond=None)
        np.testing.assert_allclose(fit.params.beta, expected, rtol=1e-8, atol=1e-10)
        self.assertTrue(np.all(np.linalg.eigvalsh(fit.covariance) > 0))

    def test_logistic_separation(self):
        z = design(self.rng, 60)
        y = np.where(z[:, 1] > 0, 1.0, 2.0)
        with self.assertRaises(SeparationError) as ctx:
            fit_mle(self.registry.get_family(FamilyKind.LOGISTIC, 2), y, z, name="y2")
        self.assertEqual(ctx.exception.visit, "y2")

    def test_poisson_recovers_truth(self):
        z = design(self.rng, 2000)
        beta = np.array([0.5, 0.3])
        y = self.rng.poisson(np.exp(z @ beta)).astype(float)
        fit = fit_mle(self.registry.get_family(FamilyKind.POISSON, 2), y, z)
        np.testing.assert_allclose(fit.params.beta, beta, atol=0.08)

    def test_negative_binomial_estimates_overdispersion(self):
        z = design(self.rng, 3000)
        mu = np.exp(z @ np.array([1.0, 0.2]))
        kappa = 0.5
        y = self.rng.negative_binomial(1.0 / kappa, 1.0 / (1.0 + kappa * mu)).astype(float)
        fit = fit_mle(self.registry.get_family(FamilyKind.NEG_BINOMIAL, 2), y, z)
        self.assertAlmostEqual(fit.params.phi, kappa, delta=0.1)


if __name__ == "__main__":
    unittest.main()
