# Licensed under the MIT License.

import unittest

import numpy as np
from scipy import stats

from mdalab.data.schema import VariableKind, VisitType
from mdalab.models.base import FamilyKind, FamilyParams, LinearPredictorContext
from mdalab.models.registry import FamilyRegistry
from mdalab.utils.status import ConfigurationError, DomainError

STEP = 1e-5
POINTS = 25


def numeric_gradient(func, x, h=STEP):
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for k in range(x.size):
        up, down = x.copy(), x.copy()
        up[k] += h
        down[k] -= h
        grad[k] = (func(up) - func(down)) / (2.0 * h)
    return grad


def random_case(kind, rng, n=30, r=3):
    """A family, a parameter draw and responses drawn from the model."""
    registry = FamilyRegistry()
    levels = {FamilyKind.PROP_ODDS: 4, FamilyKind.MULTI_LOGIT: 3, FamilyKind.LOGISTIC: 2}.get(kind)
    family = registry.get_family(kind, r, levels)
    beta = 0.5 * rng.standard_normal(family.n_params)
    phi = {FamilyKind.NORMAL: 1.5, FamilyKind.SKEW_T: 1.5, FamilyKind.NEG_BINOMIAL: 0.7}.get(kind)
    skew = kind == FamilyKind.SKEW_T
    params = FamilyParams(beta, phi=phi, psi=0.3 if skew else 0.0, nu=10.0 if skew else np.inf)
    z = np.column_stack([np.ones(n), 0.7 * rng.standard_normal((n, r - 1))])
    y = family.sample_response(z, params, rng)
    return family, params, z, y


GLM_KINDS = [
    FamilyKind.NORMAL,
    FamilyKind.LOGISTIC,
    FamilyKind.PROP_ODDS,
    FamilyKind.MULTI_LOGIT,
    FamilyKind.POISSON,
    FamilyKind.NEG_BINOMIAL,
    FamilyKind.SKEW_T,
]


class TestScore(unittest.TestCase):
    def test_score_matches_finite_differences(self):
        rng = np.random.default_rng(2024)
        for kind in GLM_KINDS:
            with self.subTest(kind=kind.value):
                for _ in range(POINTS):
                    family, params, z, y = random_case(kind, rng)
                    offset = 0.2 * rng.standard_normal(y.shape[0])
                    weight = rng.uniform(0.5, 2.0, y.shape[0])

                    def loglik(beta):
                        return float(np.sum(family.log_density(y, z, params.with_beta(beta), offset, weight)))

                    expected = numeric_gradient(loglik, params.beta)
                    actual = family.score_beta(y, z, params, offset, weight)
                    np.testing.assert_allclose(actual, expected, rtol=1e-5, atol=1e-6)

    def test_fisher_is_positive_semidefinite(self):
        rng = np.random.default_rng(7)
        for kind in GLM_KINDS:
            family, params, z, y = random_case(kind, rng)
            info = family.fisher_beta(y, z, params)
            self.assertGreaterEqual(np.min(np.linalg.eigvalsh(info)), -1e-10, kind.value)


class TestMissingCellDerivatives(unittest.TestCase):
    """A gap that is a predictor (slot 1 of z) or the response of the visit."""

    def check_predictor_cell(self, kind, rng):
        family, params, z, y = random_case(kind, rng, n=1, r=3)
        ctx = LinearPredictorContext.from_selector(z[0], [1])
        offset = 0.1

        def loglik(cell):
            row = z[0].copy()
            row[1] = cell[0]
            return float(family.log_density(y, row[None, :], params, offset)[0])

        def grad(cell):
            row = z[0].copy()
            row[1] = cell[0]
            local = LinearPredictorContext.from_selector(row, [1])
            return family.grad_yc(y[0], local, params, offset)

        point = np.array([z[0, 1]])
        np.testing.assert_allclose(family.grad_yc(y[0], ctx, params, offset), numeric_gradient(loglik, point), rtol=1e-5, atol=1e-7)
        hess = family.hess_yc(y[0], ctx, params, offset)
        np.testing.assert_allclose(hess, -numeric_gradient(lambda c: grad(c)[0], point)[None, :], rtol=1e-5, atol=1e-7)
        self.assertGreaterEqual(np.min(np.linalg.eigvalsh(hess)), -1e-12)

    def test_predictor_cell(self):
        rng = np.random.default_rng(99)
        for kind in GLM_KINDS:
            with self.subTest(kind=kind.value):
                for _ in range(POINTS):
                    self.check_predictor_cell(kind, rng)

    def test_response_cell_normal(self):
        rng = np.random.default_rng(5)
        registry = FamilyRegistry()
        for kind in (FamilyKind.NORMAL, FamilyKind.SKEW_T):
            family = registry.get_family(kind, 2)
            for _ in range(POINTS):
                params = FamilyParams(rng.standard_normal(2), phi=rng.uniform(0.5, 3.0))
                z = np.array([1.0, rng.standard_normal()])
                ctx = LinearPredictorContext(z, np.zeros((2, 1)), response=0)
                y = rng.standard_normal()
                offset, weight = 0.3, 1.7

                def loglik(cell):
                    return float(family.log_density(cell, z[None, :], params, offset, weight)[0])

                expected = numeric_gradient(loglik, np.array([y]))
                np.testing.assert_allclose(family.grad_yc(y, ctx, params, offset, weight), expected, rtol=1e-5, atol=1e-7)
                np.testing.assert_allclose(
                    family.hess_yc(y, ctx, params, offset, weight), [[params.phi * weight]], rtol=1e-12
                )


class TestDensities(unittest.TestCase):
    def test_poisson_matches_scipy(self):
        family = FamilyRegistry().get_family(FamilyKind.POISSON, 1)
        params = FamilyParams(np.array([np.log(3.0)]))
        y = np.arange(0.0, 12.0)
        np.testing.assert_allclose(
            family.log_density(y, np.ones((12, 1)), params), stats.poisson.logpmf(y, 3.0), rtol=1e-12
        )

    def test_negative_binomial_matches_scipy(self):
        family = FamilyRegistry().get_family(FamilyKind.NEG_BINOMIAL, 1)
        kappa, mu = 0.4, 2.5
        params = FamilyParams(np.array([np.log(mu)]), phi=kappa)
        y = np.arange(0.0, 15.0)
        size = 1.0 / kappa
        expected = stats.nbinom.logpmf(y, size, size / (size + mu))
        np.testing.assert_allclose(family.log_density(y, np.ones((15, 1)), params), expected, rtol=1e-10)

    def test_categorical_probabilities_sum_to_one(self):
        rng = np.random.default_rng(1)
        for kind in (FamilyKind.PROP_ODDS, FamilyKind.MULTI_LOGIT):
            family, params, z, _ = random_case(kind, rng)
            probs = np.exp(np.column_stack([
                family.log_density(np.full(z.shape[0], float(k)), z, params) for k in range(1, family.levels + 1)
            ]))
            np.testing.assert_allclose(probs.sum(axis=1), 1.0, rtol=1e-12)

    def test_samples_lie_in_support(self):
        rng = np.random.default_rng(8)
        for kind in (FamilyKind.LOGISTIC, FamilyKind.PROP_ODDS, FamilyKind.MULTI_LOGIT):
            family, params, z, y = random_case(kind, rng, n=500)
            self.assertTrue(set(np.unique(y)).issubset(set(range(1, family.levels + 1))))
        for kind in (FamilyKind.POISSON, FamilyKind.NEG_BINOMIAL):
            _, _, _, y = random_case(kind, rng, n=500)
            self.assertTrue(np.all(y >= 0) and np.all(y == np.floor(y)))

    def test_logistic_offset_shifts_log_odds(self):
        family = FamilyRegistry().get_family(FamilyKind.LOGISTIC, 1)
        params = FamilyParams(np.array([0.4]))
        z = np.ones((1, 1))
        shifted = family.log_density(np.array([1.0]), z, params, offset=-1.0)[0]
        self.assertAlmostEqual(np.exp(shifted), 1.0 / (1.0 + np.exp(-(0.4 - 1.0))), places=12)

    def test_domain_errors(self):
        registry = FamilyRegistry()
        with self.assertRaises(DomainError):
            registry.get_family(FamilyKind.LOGISTIC, 1).log_density(np.array([3.0]), np.ones((1, 1)), FamilyParams(np.zeros(1)))
        with self.assertRaises(DomainError):
            registry.get_family(FamilyKind.POISSON, 1).log_density(np.array([-1.0]), np.ones((1, 1)), FamilyParams(np.zeros(1)))

    def test_count_support_is_truncated(self):
        family = FamilyRegistry().get_family(FamilyKind.POISSON, 1)
        support = family.support(np.ones((1, 1)), FamilyParams(np.array([np.log(4.0)])))
        self.assertEqual(support[0], 0.0)
        self.assertLess(stats.poisson.sf(support[-1], 4.0), 1e-8)
        self.assertGreaterEqual(stats.poisson.sf(support[-1] - 1, 4.0), 1e-8)


class TestRegistry(unittest.TestCase):
    def test_defaults(self):
        registry = FamilyRegistry()
        self.assertEqual(registry.default_kind(VisitType(name="a", kind=VariableKind.CONTINUOUS)), FamilyKind.NORMAL)
        self.assertEqual(registry.default_kind(VisitType(name="a", kind=VariableKind.BINARY)), FamilyKind.LOGISTIC)
        self.assertEqual(registry.default_kind(VisitType(name="a", kind=VariableKind.COUNT)), FamilyKind.POISSON)

    def test_incompatible_family(self):
        registry = FamilyRegistry()
        with self.assertRaises(ConfigurationError) as ctx:
            registry.for_visit(VisitType(name="a", kind=VariableKind.COUNT), 2, FamilyKind.NORMAL)
        self.assertEqual(ctx.exception.field, "model.visits.a.family")


if __name__ == "__main__":
    unittest.main()
