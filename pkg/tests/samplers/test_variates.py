# Licensed under the MIT License.

import unittest

import numpy as np
from scipy import integrate, stats

from mdalab.samplers.normal_gamma import draw_normal_gamma
from mdalab.samplers.variates import draw_g_exp_inv, draw_g_exp_inv_counted, draw_positive_normal


class TestGExpInv(unittest.TestCase):
    def test_mean_matches_quadrature(self):
        c, b, a = 2.0, 1.5, 0.7
        rng = np.random.default_rng(4)
        draws = np.array([draw_g_exp_inv(c, b, a, rng) for _ in range(20000)])

        def kernel(g, power):
            return g ** (c - 1.0 + power) * np.exp(-b * g - a / g)

        mean = integrate.quad(kernel, 0, np.inf, args=(1,))[0] / integrate.quad(kernel, 0, np.inf, args=(0,))[0]
        self.assertAlmostEqual(draws.mean(), mean, delta=0.03)

    def test_zero_a_is_a_plain_gamma(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            _, trials = draw_g_exp_inv_counted(3.0, 2.0, 0.0, rng)
            self.assertEqual(trials, 1)

    def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            draw_g_exp_inv(0.0, 1.0, 1.0, np.random.default_rng(0))


class TestPositiveNormal(unittest.TestCase):
    def test_matches_truncated_normal(self):
        rng = np.random.default_rng(6)
        for mu, sigma in ((1.0, 2.0), (-1.0, 1.0), (-6.0, 1.0)):
            with self.subTest(mu=mu):
                draws = draw_positive_normal(np.full(20000, mu), sigma**2, rng)
                self.assertTrue(np.all(draws > 0))
                expected = stats.truncnorm(-mu / sigma, np.inf, loc=mu, scale=sigma)
                self.assertAlmostEqual(draws.mean(), expected.mean(), delta=4 * expected.std() / np.sqrt(20000))

    def test_shape_is_kept(self):
        draws = draw_positive_normal(np.zeros((3, 4)), 1.0, np.random.default_rng(0))
        self.assertEqual(draws.shape, (3, 4))


class TestNormalGamma(unittest.TestCase):
    def test_moments(self):
        rng = np.random.default_rng(12)
        n = 50
        z = np.column_stack([np.ones(n), rng.standard_normal(n)])
        y = z @ np.array([0.5, 1.5]) + 0.8 * rng.standard_normal(n)
        w = np.column_stack([z, y])
        D = w.T @ w
        beta_hat, *_ = np.linalg.lstsq(z, y, rcond=None)
        sse = float(np.sum((y - z @ beta_hat) ** 2))
        draws = [draw_normal_gamma(D, n, rng) for _ in range(20000)]
        betas = np.array([d[0] for d in draws])
        gammas = np.array([d[1] for d in draws])
        self.assertAlmostEqual(gammas.mean() * sse / (n - 2), 1.0, delta=0.02)
        np.testing.assert_allclose(betas.mean(axis=0), beta_hat, atol=0.01)

    def test_degrees_must_exceed_dimension(self):
        with self.assertRaises(ValueError):
            draw_normal_gamma(np.eye(3), 2.0, np.random.default_rng(0))


if __name__ == "__main__":
    unittest.main()
