# Licensed under the MIT License.

"""Density and parameterizations of the skew-t distribution.

The density with location mu, scale omega, skewness lambda and nu degrees of freedom is

    (2 / omega) t_nu(r) T_{nu+1}(lambda r sqrt((nu + 1) / (nu + r^2))),  r = (y - mu) / omega,

and nu = inf gives the skew-normal 2/omega phi(r) Phi(lambda r).
"""

import numpy as np
from scipy import stats

LOG2 = np.log(2.0)


def to_omega_lambda(psi, gamma):
    """(psi, gamma) -> (omega^2, lambda)."""
    return 1.0 / gamma + psi**2, psi * np.sqrt(gamma)


def from_omega_lambda(omega2, lam):
    """(omega^2, lambda) -> (psi, gamma)."""
    gamma = (1.0 + lam**2) / omega2
    return lam / np.sqrt(gamma), gamma


def skewt_logpdf(y, mu, omega2, lam, nu) -> np.ndarray:
    omega = np.sqrt(omega2)
    r = (np.asarray(y, dtype=float) - mu) / omega
    if np.isinf(nu):
        return LOG2 - np.log(omega) + stats.norm.logpdf(r) + stats.norm.logcdf(lam * r)
    shape = lam * r * np.sqrt((nu + 1.0) / (nu + r**2))
    return LOG2 - np.log(omega) + stats.t.logpdf(r, nu) + stats.t.logcdf(shape, nu + 1.0)


def skewt_pdf(y, mu, omega2, lam, nu) -> np.ndarray:
    return np.exp(skewt_logpdf(y, mu, omega2, lam, nu))


def sample_skewt(mu, psi, gamma, nu, size, rng: np.random.Generator) -> np.ndarray:
    """Draw via y = mu + psi*w + e/sqrt(d) with w ~ N+(0, 1/d), e ~ N(0, 1/gamma)."""
    d = np.ones(size) if np.isinf(nu) else rng.gamma(nu / 2.0, 2.0 / nu, size=size)
    w = np.abs(rng.standard_normal(size)) / np.sqrt(d)
    return mu + psi * w + rng.standard_normal(size) / np.sqrt(d * gamma)
