# Licensed under the MIT License.

"""Data-augmentation Gibbs cycle for skew-t and skew-normal regression.

Observations are represented as y = z'beta + psi*w + e/sqrt(d) with
w | d ~ N+(0, 1/d), e ~ N(0, 1/gamma) and d ~ G(nu/2, nu/2). Priors: flat on
beta, Student-t on lambda through psi | d_psi, half-t on sigma through gamma | rho,
and the PC prior on nu.
"""

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, model_validator

from mdalab.models.base import FamilyParams
from mdalab.samplers.mh import AcceptanceTracker, MhTuning, rw_mh_lognu
from mdalab.samplers.normal_gamma import draw_normal_gamma
from mdalab.samplers.variates import draw_g_exp_inv, draw_gamma, draw_positive_normal
from mdalab.skewt.distribution import skewt_logpdf, to_omega_lambda
from mdalab.skewt.prior import PcPrior


PI2 = np.pi**2
_DEFAULT_TUNING = MhTuning()


class SkewTHyper(BaseModel):
    """Hyperparameters of the skew regression priors.

    ``skew`` false fixes psi at 0 (Student-t regression); ``px`` toggles the
    parameter-expansion moves.
    """

    n0: float = 2.0
    a0: float = 1e5
    p0: float = 0.7
    nu0: float = 10.0
    nu_l: float = 2.0
    nu_m: float = 1000.0
    skew: bool = True
    px: bool = True

    @model_validator(mode="after")
    def _check(self):
        if min(self.n0, self.a0, self.p0) <= 0:
            raise ValueError("n0, a0 and p0 must be positive")
        if not 2.0 <= self.nu_l < self.nu0 < self.nu_m:
            raise ValueError("need 2 <= nu_l < nu0 < nu_m")
        return self

    def pc_prior(self) -> PcPrior:
        return _pc_prior(self.p0, self.nu0, self.nu_l, self.nu_m)


@lru_cache(maxsize=32)
def _pc_prior(p0, nu0, nu_l, nu_m) -> PcPrior:
    return PcPrior.calibrated(p0, nu0, nu_l, nu_m)


@dataclass(frozen=True)
class SkewTLatents:
    d: np.ndarray
    w: np.ndarray
    d_psi: float
    rho: float


@dataclass(frozen=True)
class SkewTState:
    """Parameters (beta, gamma=phi, psi, nu) and latents of one skew visit.

    nu = inf selects the skew-normal mode, where d is fixed at 1.
    """

    params: FamilyParams
    latents: SkewTLatents

    @property
    def skew_normal(self) -> bool:
        return bool(np.isinf(self.params.nu))


def init_skewt_state(y, z, hyper: SkewTHyper, rng: np.random.Generator, skew_normal: bool = False) -> SkewTState:
    """Least-squares start with unit latents."""
    y = np.asarray(y, dtype=float)
    beta, *_ = np.linalg.lstsq(z, y, rcond=None)
    resid = y - z @ beta
    gamma = 1.0 / max(float(np.var(resid)), 1e-8)
    n = y.shape[0]
    w = np.abs(rng.standard_normal(n)) + 1e-3 if hyper.skew else np.zeros(n)
    params = FamilyParams(beta=beta, phi=gamma, psi=0.0, nu=np.inf if skew_normal else hyper.nu0)
    return SkewTState(params, SkewTLatents(d=np.ones(n), w=w, d_psi=1.0, rho=1.0))


def skewt_loglik(nu, y, z, beta, psi, gamma) -> float:
    omega2, lam = to_omega_lambda(psi, gamma)
    return float(np.sum(skewt_logpdf(y, z @ beta, omega2, lam, nu)))


def nu_posterior_logdensity(nu, y, z, beta, psi, gamma, prior: PcPrior) -> float:
    """Latent-free log posterior of nu up to a constant."""
    return skewt_loglik(nu, y, z, beta, psi, gamma) + prior.logpdf(nu)


def draw_latents(resid, gamma: float, psi: float, nu: float, skew: bool, rng: np.random.Generator, d, w):
    """Joint draw of the latents (d, w) given the residuals y - z'beta.

    In the skew-t mode w is drawn with d integrated out and d then follows from
    (w, y). Without skewness w stays at 0; in the skew-normal mode d stays at 1.
    """
    n = resid.shape[0]
    if skew:
        v_w = gamma * psi**2 + 1.0
        mu_w = gamma * psi * resid / v_w
        if np.isinf(nu):
            return np.ones(n), draw_positive_normal(mu_w, 1.0 / v_w, rng)
        b_a = nu + 1.0
        b_d = nu + gamma * resid**2 / v_w
        d_star = draw_gamma(b_a / 2.0, b_d / 2.0, rng, size=n)
        w = draw_positive_normal(mu_w, 1.0 / (d_star * v_w), rng)
        d = draw_gamma((b_a + 1.0) / 2.0, (b_d + (w - mu_w) ** 2 * v_w) / 2.0, rng, size=n)
    elif not np.isinf(nu):
        d = draw_gamma((nu + 1.0) / 2.0, (nu + gamma * resid**2) / 2.0, rng, size=n)
    return d, w


def gibbs_cycle(
    state: SkewTState,
    y,
    z,
    hyper: SkewTHyper,
    rng: np.random.Generator,
    tracker: AcceptanceTracker | None = None,
    adapt: bool = False,
) -> SkewTState:
    """One full cycle: rho, d_psi, (psi, beta, gamma), nu, latents, then the PX moves."""
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    n = y.shape[0]
    params, lat = state.params, state.latents
    skew = hyper.skew
    skew_normal = state.skew_normal
    beta, gamma, psi, nu = params.beta, params.phi, params.psi, params.nu
    d, w, d_psi = lat.d, lat.w, lat.d_psi

    rho = draw_gamma((hyper.n0 + 1.0) / 2.0, hyper.n0 * gamma + 1.0 / hyper.a0**2, rng)
    if skew:
        d_psi = draw_gamma(0.75, 0.25 + 2.0 * gamma * psi**2 / PI2, rng)

    columns = [w[:, None], z, y[:, None]] if skew else [z, y[:, None]]
    augmented = np.hstack(columns)
    D = (augmented * d[:, None]).T @ augmented
    D[-1, -1] += 2.0 * hyper.n0 * rho
    if skew:
        D[0, 0] += 4.0 * d_psi / PI2
    coef, gamma = draw_normal_gamma(D, n + hyper.n0 + (1.0 if skew else 0.0), rng)
    psi, beta = (float(coef[0]), coef[1:]) if skew else (0.0, coef)

    if not skew_normal:
        prior = hyper.pc_prior()
        nu, accepted = rw_mh_lognu(
            nu,
            lambda v: skewt_loglik(v, y, z, beta, psi, gamma),
            prior.unnormalised_logpdf,
            hyper.nu_l,
            hyper.nu_m,
            tracker.tuning if tracker is not None else _DEFAULT_TUNING,
            rng,
        )
        if tracker is not None:
            tracker.record(accepted, adapt)

    d, w = draw_latents(y - z @ beta, gamma, psi, nu, skew, rng, d, w)

    if hyper.px and not skew_normal:
        k = 1.0 if skew else 0.0
        c = (n * (nu + k) - (hyper.n0 + k)) / 2.0
        b = float(np.sum(d * (nu + k * w**2))) / 2.0
        a = gamma * (hyper.n0 * rho + k * 2.0 * d_psi * psi**2 / PI2)
        if c > 0 and b > 0:
            g = draw_g_exp_inv(c, b, a, rng)
            d, gamma = g * d, gamma / g
    if hyper.px and skew and n > 1:
        b = float(np.sum(d * w**2)) / 2.0
        if b > 0:
            h = np.sqrt(draw_g_exp_inv((n - 1.0) / 2.0, b, 2.0 * d_psi * gamma * psi**2 / PI2, rng))
            w, psi = h * w, psi / h

    new_params = replace(params, beta=np.asarray(beta), phi=float(gamma), psi=float(psi), nu=float(nu))
    return SkewTState(new_params, SkewTLatents(d=np.asarray(d), w=np.asarray(w), d_psi=float(d_psi), rho=float(rho)))
