# Licensed under the MIT License.

import unittest
from unittest import mock

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from mdalab.models.base import FamilyKind, FamilyParams
from mdalab.models.registry import FamilyRegistry
from mdalab.samplers.mh import GaussianPrior, MhTuning, mh_update_beta, parameter_blocks, rw_mh_lognu


def normal_case(rng, n=80, r=3):
    family = FamilyRegistry().get_family(FamilyKind.NORMAL, r)
    z = np.column_stack([np.ones(n), rng.standard_normal((n, r - 1))])
    params = FamilyParams(0.5 * rng.standard_normal(r), phi=2.0)
    return family, z, family.sample_response(z, params, rng), params


class TestMhUpdateBeta(unittest.TestCase):
    def test_normal_flat_prior_always_accepts(self):
        rng = np.random.default_rng(31)
        for r in (3, 31):
            with self.subTest(r=r):
                family, z, y, params = normal_case(rng, n=120, r=r)
                flat = GaussianPrior(np.zeros(r), np.zeros((r, r)))
                moves = 0
                for _ in range(1000):
                    params, moved = mh_update_beta(family, y, z, params, flat, rng)
                    moves += moved
                self.assertEqual(moves, 1000)

    def test_dominant_prior_pins_beta(self):
        rng = np.random.default_rng(32)
        family, z, y, params = normal_case(rng)
        prior = GaussianPrior(np.zeros(3), 1e8 * np.eye(3))
        for _ in range(200):
            params, _ = mh_update_beta(family, y, z, params, prior, rng)
        self.assertLess(np.linalg.norm(params.beta), 0.01)

    def test_logistic_chain_matches_grid_posterior(self):
        rng = np.random.default_rng(33)
        n = 150
        family = FamilyRegistry().get_family(FamilyKind.LOGISTIC, 2)
        z = np.column_stack([np.ones(n), rng.standard_normal(n)])
        y = family.sample_response(z, FamilyParams(np.array([-0.5, 1.0])), rng)
        prior = GaussianPrior(np.zeros(2), 0.01 * np.eye(2))

        b0, b1 = np.meshgrid(np.linspace(-2.5, 1.5, 201), np.linspace(-1.0, 3.0, 201), indexing="ij")
        grid = np.column_stack([b0.ravel(), b1.ravel()])
        eta = grid @ z.T
        success = (y == 1.0)[None, :]
        loglik = np.where(success, -np.logaddexp(0.0, -eta), -np.logaddexp(0.0, eta)).sum(axis=1)
        logpost = loglik - 0.005 * np.sum(grid**2, axis=1)
        weights = np.exp(logpost - logsumexp(logpost))
        expected = weights @ grid

        params = FamilyParams(np.zeros(2))
        trace = []
        for t in range(6000):
            params, _ = mh_update_beta(family, y, z, params, prior, rng)
            if t >= 500:
                trace.append(params.beta)
        np.testing.assert_allclose(np.mean(trace, axis=0), expected, atol=0.04)


class TestRandomWalkNu(unittest.TestCase):
    def test_flat_target_is_uniform(self):
        rng = np.random.default_rng(34)
        tuning = MhTuning(c=1.0)
        nu, draws = 500.0, []
        for t in range(400_000):
            nu, _ = rw_mh_lognu(nu, lambda v: 0.0, lambda v: 0.0, 2.0, 1000.0, tuning, rng)
            if t >= 2000 and t % 20 == 0:
                draws.append(nu)
        statistic = stats.kstest(draws, stats.uniform(2.0, 998.0).cdf).statistic
        self.assertLess(statistic, 0.02)

    def test_candidate_above_upper_bound_is_rejected(self):
        rng = mock.Mock()
        rng.standard_normal.return_value = 1.0
        rng.random.return_value = 0.0
        loglik = mock.Mock(return_value=0.0)
        nu, accepted = rw_mh_lognu(999.0, loglik, lambda v: 0.0, 2.0, 1000.0, MhTuning(c=1.0), rng)
        self.assertEqual(nu, 999.0)
        self.assertFalse(accepted)
        loglik.assert_not_called()

    def test_start_outside_support(self):
        with self.assertRaises(ValueError):
            rw_mh_lognu(2.0, lambda v: 0.0, lambda v: 0.0, 2.0, 1000.0, MhTuning(), np.random.default_rng(0))


class TestParameterBlocks(unittest.TestCase):
    def test_long_vectors_are_split(self):
        blocks = parameter_blocks(31)
        self.assertTrue(all(len(block) <= 15 for block in blocks))
        np.testing.assert_array_equal(np.concatenate(blocks), np.arange(31))

    def test_short_vectors_stay_whole(self):
        self.assertEqual(len(parameter_blocks(30)), 1)


if __name__ == "__main__":
    unittest.main()
