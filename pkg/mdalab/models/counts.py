# Licensed under the MIT License.

"""Poisson and negative binomial count regressions with log link."""

import numpy as np
from scipy import stats
from scipy.special import gammaln

from mdalab.models.base import FamilyKind, FamilyParams, GLMFamily, check_counts
from mdalab.paths import config

TRUNCATION = config.section("count_truncation")
TAIL = float(TRUNCATION.get("tail", 1e-8))
CAP = int(TRUNCATION.get("cap", 500))


def truncation_bound(sf, tail: float = TAIL, cap: int = CAP) -> int:
    """Smallest K with Pr(y > K) < tail, capped; ``sf`` is the survival function."""
    below = np.asarray(sf(np.arange(cap + 1))) < tail
    return int(np.argmax(below)) if below.any() else cap


def log_rising_ratio(y: np.ndarray, kappa: float) -> np.ndarray:
    """log Gamma(y + 1/k) - log Gamma(1/k) - y log(1/k), summed exactly for integer y.

    Equals sum_{t<y} log(1 + t*k), which stays accurate as k goes to 0.
    """
    y = np.asarray(y, dtype=int).reshape(-1)
    if y.size == 0 or y.max() == 0:
        return np.zeros(y.shape[0])
    terms = np.log1p(np.arange(y.max()) * kappa)
    cumulative = np.concatenate([[0.0], np.cumsum(terms)])
    return cumulative[y]


class PoissonFamily(GLMFamily):
    kind = FamilyKind.POISSON

    def check_support(self, y):
        check_counts(y, self.kind.value)

    def log_density(self, y, z, params, offset=0.0, weight=1.0):
        y = np.asarray(y, dtype=float).reshape(-1)
        self.check_support(y)
        eta = self.linear_predictor(z, params, offset)
        return y * eta - np.exp(eta) - gammaln(y + 1.0)

    def eta_derivatives(self, y, eta, params, weight=1.0):
        mu = np.exp(eta)
        return np.asarray(y, dtype=float) - mu, mu

    def expected_information(self, eta, params, weight=1.0):
        return np.exp(eta)

    def sample_response(self, z, params, rng, offset=0.0):
        mu = np.exp(self.linear_predictor(z, params, offset))
        return stats.poisson.ppf(rng.random(mu.shape[0]), mu).astype(float)

    def support(self, z, params, offset=0.0):
        mu = float(np.exp(self.linear_predictor(z, params, offset))[0])
        return np.arange(0.0, truncation_bound(lambda k: stats.poisson.sf(k, mu)) + 1.0)


class NegBinomialFamily(GLMFamily):
    """NB2 regression: mean mu = exp(eta), variance mu (1 + kappa mu)."""

    kind = FamilyKind.NEG_BINOMIAL

    def initial_params(self) -> FamilyParams:
        return FamilyParams(beta=np.zeros(self.n_params), phi=1.0)

    def check_support(self, y):
        check_counts(y, self.kind.value)

    def log_density(self, y, z, params, offset=0.0, weight=1.0):
        y = np.asarray(y, dtype=float).reshape(-1)
        self.check_support(y)
        kappa = params.phi
        mu = np.exp(self.linear_predictor(z, params, offset))
        return (
            log_rising_ratio(y, kappa)
            - gammaln(y + 1.0)
            + y * np.log(mu)
            - (y + 1.0 / kappa) * np.log1p(kappa * mu)
        )

    def eta_derivatives(self, y, eta, params, weight=1.0):
        kappa = params.phi
        y = np.asarray(y, dtype=float)
        mu = np.exp(eta)
        denom = 1.0 + kappa * mu
        return (y - mu) / denom, (1.0 + kappa * y) * mu / denom**2

    def expected_information(self, eta, params, weight=1.0):
        mu = np.exp(eta)
        return mu / (1.0 + params.phi * mu)

    def _scipy_args(self, mu, kappa):
        size = 1.0 / kappa
        return size, size / (size + mu)

    def sample_response(self, z, params, rng, offset=0.0):
        mu = np.exp(self.linear_predictor(z, params, offset))
        size, prob = self._scipy_args(mu, params.phi)
        return stats.nbinom.ppf(rng.random(mu.shape[0]), size, prob).astype(float)

    def support(self, z, params, offset=0.0):
        mu = float(np.exp(self.linear_predictor(z, params, offset))[0])
        size, prob = self._scipy_args(mu, params.phi)
        return np.arange(0.0, truncation_bound(lambda k: stats.nbinom.sf(k, size, prob)) + 1.0)
