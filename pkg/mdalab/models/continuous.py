# Licensed under the MIT License.

"""Normal linear regression and the skew-normal / skew-t regressions.

Given the mixing weight d and skew latent w of an observation, the skew families
are normal with mean z'beta + psi*w and precision d*gamma. Callers pass ``psi*w``
as ``offset`` and ``d`` as ``weight``; the Normal family uses the defaults.
"""

import numpy as np

from mdalab.models.base import FamilyKind, FamilyParams, GLMFamily, as_design
from mdalab.skewt.distribution import skewt_logpdf, to_omega_lambda

LOG_2PI = np.log(2.0 * np.pi)


class NormalFamily(GLMFamily):
    kind = FamilyKind.NORMAL
    discrete = False

    def initial_params(self) -> FamilyParams:
        return FamilyParams(beta=np.zeros(self.n_params), phi=1.0)

    def log_density(self, y, z, params, offset=0.0, weight=1.0):
        y = np.asarray(y, dtype=float).reshape(-1)
        precision = params.phi * np.asarray(weight, dtype=float)
        resid = y - self.linear_predictor(z, params, offset)
        return 0.5 * (np.log(precision) - LOG_2PI) - 0.5 * precision * resid**2

    def eta_derivatives(self, y, eta, params, weight=1.0):
        precision = params.phi * np.asarray(weight, dtype=float)
        d1 = precision * (np.asarray(y, dtype=float) - eta)
        return d1, np.broadcast_to(precision, np.shape(d1)).astype(float)

    def expected_information(self, eta, params, weight=1.0):
        return np.broadcast_to(params.phi * np.asarray(weight, dtype=float), np.shape(eta)).astype(float)

    def sample_response(self, z, params, rng, offset=0.0):
        eta = self.linear_predictor(z, params, offset)
        return eta + rng.standard_normal(eta.shape[0]) / np.sqrt(params.phi)


class SkewTFamily(NormalFamily):
    """y = z'beta + psi*w + e/sqrt(d), w ~ N+(0, 1/d), e ~ N(0, 1/gamma), d ~ G(nu/2, nu/2)."""

    kind = FamilyKind.SKEW_T

    def initial_params(self) -> FamilyParams:
        return FamilyParams(beta=np.zeros(self.n_params), phi=1.0, psi=0.0, nu=10.0)

    def draw_mixing(self, params, n, rng) -> np.ndarray:
        return rng.gamma(params.nu / 2.0, 2.0 / params.nu, size=n)

    def sample_response(self, z, params, rng, offset=0.0):
        eta = self.linear_predictor(z, params, offset)
        n = eta.shape[0]
        d = self.draw_mixing(params, n, rng)
        w = np.abs(rng.standard_normal(n)) / np.sqrt(d)
        return eta + params.psi * w + rng.standard_normal(n) / np.sqrt(d * params.phi)

    def marginal_log_density(self, y, z, params, offset=0.0) -> np.ndarray:
        """Latent-free log density of the skew regression."""
        omega2, lam = to_omega_lambda(params.psi, params.phi)
        return skewt_logpdf(y, self.linear_predictor(as_design(z), params, offset), omega2, lam, params.nu)


class SkewNormalFamily(SkewTFamily):
    kind = FamilyKind.SKEW_NORMAL

    def initial_params(self) -> FamilyParams:
        return FamilyParams(beta=np.zeros(self.n_params), phi=1.0, psi=0.0, nu=np.inf)

    def draw_mixing(self, params, n, rng) -> np.ndarray:
        # Still consume n variates so streams stay aligned with the skew-t family.
        rng.random(n)
        return np.ones(n)
