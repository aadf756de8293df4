# Licensed under the MIT License.

"""Block draws from normal-gamma densities."""

import numpy as np
from scipy import linalg

from mdalab.utils.linalg import safe_cholesky


def draw_normal_gamma(D: np.ndarray, m: float, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """Draw (beta, gamma) with density proportional to gamma^{m/2-1} exp(-gamma b'Db/2), b = (-beta, 1).

    With D = LL' and C = L^{-1}: t_1..t_l ~ N(0, 1), t_{l+1}^2 ~ chi^2_{m-l}, h = C't,
    then gamma = h_{l+1}^2 and beta = -h_{1..l} / h_{l+1}.

    Args:
        D (np.ndarray): Symmetric positive definite (l+1) x (l+1) matrix.
        m (float): Degrees parameter, must exceed l.
        rng (np.random.Generator): Random stream.

    Returns:
        tuple: beta (length l) and gamma.
    """
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError("D must be a square matrix")
    l = D.shape[0] - 1
    if m <= l:
        raise ValueError(f"degrees parameter m={m} must exceed l={l}")
    factor = safe_cholesky(D, "normal-gamma scatter matrix")
    t = np.empty(l + 1)
    t[:l] = rng.standard_normal(l)
    t[l] = np.sqrt(rng.chisquare(m - l))
    h = linalg.solve_triangular(factor.T, t, lower=False)
    return -h[:l] / h[l], float(h[l] ** 2)
