# Licensed under the MIT License.

"""Binary, ordinal and nominal response families."""

import numpy as np
from scipy.special import expit, log_expit, logsumexp, softmax

from mdalab.models.base import (
    Family,
    FamilyKind,
    FamilyParams,
    GLMFamily,
    LinearPredictorContext,
    as_design,
    check_categories,
)


class LogisticFamily(GLMFamily):
    """Binary response coded 1/2 with Pr(y = 1) = expit(z'beta)."""

    kind = FamilyKind.LOGISTIC

    def __init__(self, n_predictors: int, levels: int | None = 2):
        super().__init__(n_predictors, 2)

    def check_support(self, y):
        check_categories(y, 2, self.kind.value)

    def log_density(self, y, z, params, offset=0.0, weight=1.0):
        y = np.asarray(y, dtype=float).reshape(-1)
        self.check_support(y)
        eta = self.linear_predictor(z, params, offset)
        return np.where(y == 1, log_expit(eta), log_expit(-eta))

    def eta_derivatives(self, y, eta, params, weight=1.0):
        pi = expit(eta)
        return (np.asarray(y) == 1).astype(float) - pi, pi * (1.0 - pi)

    def expected_information(self, eta, params, weight=1.0):
        pi = expit(eta)
        return pi * (1.0 - pi)

    def sample_response(self, z, params, rng, offset=0.0):
        pi = expit(self.linear_predictor(z, params, offset))
        return np.where(rng.random(pi.shape[0]) < pi, 1.0, 2.0)

    def support(self, z=None, params=None, offset=0.0):
        return np.array([1.0, 2.0])


class PropOddsFamily(Family):
    """Cumulative logit model Pr(y <= k) = expit(c_k + z'beta).

    The parameter vector is (d_2, ..., d_{K-1}, beta) with c_1 = 0 and
    c_k = sum_{t=2..k} exp(d_t), so cutpoints increase for any value of d.
    """

    kind = FamilyKind.PROP_ODDS

    @property
    def n_cut(self) -> int:
        return self.levels - 2

    @property
    def n_params(self) -> int:
        return self.n_cut + self.n_predictors

    def check_support(self, y):
        check_categories(y, self.levels, self.kind.value)

    def cutpoints(self, params: FamilyParams) -> np.ndarray:
        increments = np.exp(params.beta[: self.n_cut])
        return np.concatenate([[0.0], np.cumsum(increments)])

    def cumulative(self, eta, params) -> np.ndarray:
        """gamma_0..gamma_K per observation, with gamma_0 = 0 and gamma_K = 1."""
        inner = expit(self.cutpoints(params)[None, :] + np.asarray(eta)[:, None])
        n = inner.shape[0]
        return np.hstack([np.zeros((n, 1)), inner, np.ones((n, 1))])

    def probabilities(self, z, params, offset=0.0) -> np.ndarray:
        return np.diff(self.cumulative(self.linear_predictor(z, params, offset), params), axis=1)

    def log_density(self, y, z, params, offset=0.0, weight=1.0):
        y = np.asarray(y, dtype=float).reshape(-1)
        self.check_support(y)
        probs = self.probabilities(z, params, offset)
        return np.log(probs[np.arange(y.shape[0]), y.astype(int) - 1])

    def _prob_derivatives(self, z, params, offset):
        """d pi_k / d params for every observation and category, shape (n, K, P)."""
        z = as_design(z)
        n = z.shape[0]
        gam = self.cumulative(self.linear_predictor(z, params, offset), params)
        slopes = gam * (1.0 - gam)
        increments = np.exp(params.beta[: self.n_cut])
        dgam = np.zeros((n, self.levels + 1, self.n_params))
        for k in range(1, self.levels):
            # c_k depends on d_t for t = 2..k
            dcut = np.where(np.arange(self.n_cut) + 2 <= k, increments, 0.0)
            dgam[:, k, : self.n_cut] = slopes[:, k, None] * dcut[None, :]
            dgam[:, k, self.n_cut :] = slopes[:, k, None] * z
        return np.diff(gam, axis=1), np.diff(dgam, axis=1)

    def score_beta(self, y, z, params, offset=0.0, weight=1.0):
        y = np.asarray(y, dtype=float).reshape(-1)
        self.check_support(y)
        probs, dprobs = self._prob_derivatives(z, params, offset)
        rows = np.arange(y.shape[0])
        picked = y.astype(int) - 1
        return np.sum(dprobs[rows, picked, :] / probs[rows, picked, None], axis=0)

    def fisher_beta(self, y, z, params, offset=0.0, weight=1.0):
        probs, dprobs = self._prob_derivatives(z, params, offset)
        return np.einsum("nkp,nkq,nk->pq", dprobs, dprobs, 1.0 / probs)

    def eta_derivatives(self, y, eta, params, weight=1.0):
        gam = self.cumulative(eta, params)
        rows = np.arange(gam.shape[0])
        picked = np.asarray(y, dtype=int)
        upper, lower = gam[rows, picked], gam[rows, picked - 1]
        return 1.0 - upper - lower, upper * (1.0 - upper) + lower * (1.0 - lower)

    def sample_response(self, z, params, rng, offset=0.0):
        gam = self.cumulative(self.linear_predictor(z, params, offset), params)
        u = rng.random(gam.shape[0])
        return 1.0 + np.sum(u[:, None] > gam[:, 1:-1], axis=1)

    def support(self, z=None, params=None, offset=0.0):
        return np.arange(1.0, self.levels + 1.0)


class MultiLogitFamily(Family):
    """Baseline-category logit with reference category K.

    The parameter vector stacks beta_1, ..., beta_{K-1}, one block of length r each.
    """

    kind = FamilyKind.MULTI_LOGIT

    @property
    def n_params(self) -> int:
        return (self.levels - 1) * self.n_predictors

    def check_support(self, y):
        check_categories(y, self.levels, self.kind.value)

    def coefficient_matrix(self, params: FamilyParams) -> np.ndarray:
        return params.beta.reshape(self.levels - 1, self.n_predictors)

    def linear_predictor(self, z, params, offset=0.0):
        offset = np.asarray(offset, dtype=float)
        if offset.ndim == 1:
            offset = offset[:, None]
        return as_design(z) @ self.coefficient_matrix(params).T + offset

    def probabilities(self, z, params, offset=0.0) -> np.ndarray:
        eta = self.linear_predictor(z, params, offset)
        return softmax(np.hstack([eta, np.zeros((eta.shape[0], 1))]), axis=1)

    def log_density(self, y, z, params, offset=0.0, weight=1.0):
        y = np.asarray(y, dtype=float).reshape(-1)
        self.check_support(y)
        eta = self.linear_predictor(z, params, offset)
        full = np.hstack([eta, np.zeros((eta.shape[0], 1))])
        return full[np.arange(y.shape[0]), y.astype(int) - 1] - logsumexp(full, axis=1)

    def _indicators(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=int).reshape(-1)
        return (y[:, None] == np.arange(1, self.levels)[None, :]).astype(float)

    def score_beta(self, y, z, params, offset=0.0, weight=1.0):
        y = np.asarray(y, dtype=float).reshape(-1)
        self.check_support(y)
        z = as_design(z)
        resid = self._indicators(y) - self.probabilities(z, params, offset)[:, :-1]
        return (resid.T @ z).reshape(-1)

    def fisher_beta(self, y, z, params, offset=0.0, weight=1.0):
        z = as_design(z)
        pi = self.probabilities(z, params, offset)[:, :-1]
        info = np.zeros((self.n_params, self.n_params))
        for zi, p in zip(z, pi):
            info += np.kron(np.diag(p) - np.outer(p, p), np.outer(zi, zi))
        return info

    def eta_derivatives(self, y, eta, params, weight=1.0):
        full = np.hstack([eta, np.zeros((eta.shape[0], 1))])
        pi = softmax(full, axis=1)[:, :-1]
        return self._indicators(y) - pi, pi

    def grad_yc(self, y, ctx: LinearPredictorContext, params, offset=0.0, weight=1.0):
        pi = self.probabilities(ctx.z, params, offset)[0, :-1]
        derivs = ctx.jacobian.T @ self.coefficient_matrix(params).T
        return derivs @ (self._indicators([y])[0] - pi)

    def hess_yc(self, y, ctx: LinearPredictorContext, params, offset=0.0, weight=1.0):
        pi = self.probabilities(ctx.z, params, offset)[0, :-1]
        derivs = ctx.jacobian.T @ self.coefficient_matrix(params).T
        mean = derivs @ pi
        return (derivs * pi[None, :]) @ derivs.T - np.outer(mean, mean)

    def sample_response(self, z, params, rng, offset=0.0):
        cum = np.cumsum(self.probabilities(z, params, offset), axis=1)
        u = rng.random(cum.shape[0])
        return 1.0 + np.minimum(np.sum(u[:, None] > cum[:, :-1], axis=1), self.levels - 1)

    def support(self, z=None, params=None, offset=0.0):
        return np.arange(1.0, self.levels + 1.0)
