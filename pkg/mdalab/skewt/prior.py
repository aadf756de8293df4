# Licensed under the MIT License.

"""Penalised-complexity prior for the degrees of freedom of a t distribution.

The distance to the normal limit is d(nu) = sqrt(2 KL(nu)), with

    KL(nu) = 1/2 [1 + log(2/(nu-2))] + lgamma((nu+1)/2) - lgamma(nu/2)
             - (nu+1)/2 [digamma((nu+1)/2) - digamma(nu/2)],

and the prior is rho exp(-rho d(nu)) |d'(nu)| restricted to (nu_l, nu_m].
"""

from functools import cached_property

import numpy as np
from scipy import integrate
from scipy.special import digamma, gammaln, polygamma

from mdalab.utils.status import DomainError


def _distance_terms(log_excess: float) -> tuple[float, float]:
    """d and |d'| * (nu - 2) as functions of log(nu - 2).

    Working on log(nu - 2) keeps the integrand finite arbitrarily close to nu = 2.
    """
    excess = np.exp(log_excess)
    nu = 2.0 + excess
    half, half_up = nu / 2.0, (nu + 1.0) / 2.0
    twice_kl = (
        1.0
        + np.log(2.0)
        - log_excess
        + 2.0 * (gammaln(half_up) - gammaln(half))
        - (nu + 1.0) * (digamma(half_up) - digamma(half))
    )
    d = np.sqrt(max(twice_kl, 0.0))
    if d == 0.0:
        return 0.0, 0.0
    # d(d^2)/dnu = -1/(nu-2) - (nu+1)/2 [trigamma((nu+1)/2) - trigamma(nu/2)]
    slope = 1.0 + excess * half_up * (polygamma(1, half_up) - polygamma(1, half))
    return d, abs(slope) / (2.0 * d)


def kl_d(nu: float) -> float:
    """Distance d(nu) = sqrt(2 KL) between t_nu (unit variance) and N(0, 1)."""
    if nu <= 2.0:
        raise DomainError("nu", nu, "the distance is defined for nu > 2 only")
    return _distance_terms(np.log(nu - 2.0))[0]


def kl_d_derivative(nu: float) -> float:
    if nu <= 2.0:
        raise DomainError("nu", nu, "the distance is defined for nu > 2 only")
    _, scaled = _distance_terms(np.log(nu - 2.0))
    return scaled / (nu - 2.0)


class PcPrior:
    """Normalised PC prior on (nu_l, nu_m] with rate ``rate``."""

    def __init__(self, rate: float, nu_l: float = 2.0, nu_m: float = 1000.0):
        if rate <= 0:
            raise ValueError("rate must be positive")
        if nu_l < 2.0 or nu_m <= nu_l:
            raise ValueError("need 2 <= nu_l < nu_m")
        self.rate = rate
        self.nu_l = nu_l
        self.nu_m = nu_m

    @classmethod
    def calibrated(cls, p0: float = 0.7, nu0: float = 10.0, nu_l: float = 2.0, nu_m: float = 1000.0) -> "PcPrior":
        """Rate set to p0 / d(nu0)."""
        return cls(p0 / kl_d(nu0), nu_l, nu_m)

    def _unnormalised_log(self, log_excess: float) -> float:
        d, scaled = _distance_terms(log_excess)
        if scaled <= 0.0:
            return -np.inf
        return np.log(self.rate) - self.rate * d + np.log(scaled) - log_excess

    @cached_property
    def log_normalizer(self) -> float:
        """log of the prior mass on (nu_l, nu_m], by adaptive quadrature on log(nu - 2)."""

        def integrand(log_excess):
            # density in nu times dnu/dlog_excess
            return np.exp(self._unnormalised_log(log_excess) + log_excess)

        upper = np.log(self.nu_m - 2.0)
        lower = -np.inf if self.nu_l == 2.0 else np.log(self.nu_l - 2.0)
        breaks = [b for b in (-20.0, -5.0, 0.0, 2.0) if (lower < b < upper)]
        edges = [lower, *breaks, upper]
        mass = sum(integrate.quad(integrand, a, b, limit=200, epsabs=1e-13, epsrel=1e-11)[0] for a, b in zip(edges[:-1], edges[1:]))
        return float(np.log(mass))

    def logpdf(self, nu: float) -> float:
        if not self.nu_l < nu <= self.nu_m:
            return -np.inf
        return self._unnormalised_log(np.log(nu - 2.0)) - self.log_normalizer

    def unnormalised_logpdf(self, nu: float) -> float:
        """Log density up to the normalising constant; enough for MH ratios."""
        if not self.nu_l < nu <= self.nu_m:
            return -np.inf
        return self._unnormalised_log(np.log(nu - 2.0))


def pc_prior(nu: float, rate: float, nu_l: float = 2.0, nu_m: float = 1000.0) -> float:
    """Normalised PC prior density at ``nu``."""
    if nu <= 2.0:
        raise DomainError("nu", nu, "the PC prior is defined for nu > 2 only")
    return float(np.exp(PcPrior(rate, nu_l, nu_m).logpdf(nu)))
