# Licensed under the MIT License.

"""Scalar and vectorised random variates used inside the Gibbs cycles."""

import numpy as np
from scipy import special


def draw_gamma(shape, rate, rng: np.random.Generator, size=None):
    """Gamma variate in the shape/rate parameterization."""
    return rng.gamma(shape, 1.0 / np.asarray(rate, dtype=float), size=size)


def _g_exp_inv_envelope(c: float, b: float, a: float) -> tuple[float, float]:
    e = np.sqrt(1.0 + 4.0 * a * b / c**2)
    return 2.0 * b / (e + 1.0), b * (e - 1.0) / (e + 1.0)


def draw_g_exp_inv_counted(c: float, b: float, a: float, rng: np.random.Generator) -> tuple[float, int]:
    """Like ``draw_g_exp_inv`` but also returns the number of envelope proposals used."""
    if c <= 0 or b <= 0 or a < 0:
        raise ValueError(f"need c > 0, b > 0, a >= 0 (got c={c}, b={b}, a={a})")
    rate, r = _g_exp_inv_envelope(c, b, a)
    trials = 0
    while True:
        trials += 1
        g = rng.gamma(c, 1.0 / rate)
        if a == 0.0:
            return g, trials
        if np.log(rng.random()) < -((np.sqrt(r * g) - np.sqrt(a / g)) ** 2):
            return g, trials


def draw_g_exp_inv(c: float, b: float, a: float, rng: np.random.Generator) -> float:
    """Exact draw from f(g) proportional to g^{c-1} exp(-b g - a/g).

    Uses a G(c, d) envelope with d = 2b/(e+1), e = sqrt(1 + 4ab/c^2), and accepts with
    probability exp(-(sqrt(r g) - sqrt(a/g))^2), r = b(e-1)/(e+1).
    """
    return draw_g_exp_inv_counted(c, b, a, rng)[0]


def _tail_rejection(alpha: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Standard normal truncated to (alpha, inf) by exponential-tilting rejection."""
    out = np.empty_like(alpha)
    pending = np.arange(alpha.shape[0])
    while pending.size:
        lower = alpha[pending]
        scale = 0.5 * (lower + np.sqrt(lower**2 + 4.0))
        z = lower + rng.exponential(1.0 / scale)
        keep = rng.random(pending.size) <= np.exp(-0.5 * (z - scale) ** 2)
        out[pending[keep]] = z[keep]
        pending = pending[~keep]
    return out


def draw_positive_normal(mu, sigma2, rng: np.random.Generator) -> np.ndarray:
    """Draw from N(mu, sigma2) truncated to (0, inf); arrays are broadcast.

    Inverse-CDF on the upper tail where the truncation point sits less than four
    standard deviations above the mean, exponential-tilting rejection beyond that.
    """
    mu, sigma2 = np.broadcast_arrays(np.asarray(mu, dtype=float), np.asarray(sigma2, dtype=float))
    if np.any(sigma2 <= 0):
        raise ValueError("sigma2 must be positive")
    sigma = np.sqrt(sigma2).reshape(-1)
    flat_mu = mu.reshape(-1)
    alpha = -flat_mu / sigma
    z = np.empty_like(alpha)
    tail = alpha > 4.0
    inner = ~tail
    if inner.any():
        u = rng.random(int(inner.sum()))
        # Z > alpha  <=>  -Z < -alpha; invert the lower CDF of -Z
        upper_mass = special.ndtr(-alpha[inner])
        z[inner] = -special.ndtri(u * upper_mass)
    if tail.any():
        z[tail] = _tail_rejection(alpha[tail], rng)
    return np.maximum(flat_mu + sigma * z, np.finfo(float).tiny).reshape(mu.shape)
