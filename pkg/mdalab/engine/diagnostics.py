# Licensed under the MIT License.

"""Convergence diagnostics on retained parameter traces."""

import numpy as np


def gelman_rubin(chains: np.ndarray) -> np.ndarray:
    """Potential scale reduction factor per parameter.

    Args:
        chains (np.ndarray): Traces of shape (chains, draws, parameters).

    Returns:
        np.ndarray: R-hat per parameter; NaN with fewer than two chains or draws.
    """
    chains = np.asarray(chains, dtype=float)
    n_chains, n_draws = chains.shape[:2]
    if n_chains < 2 or n_draws < 2:
        return np.full(chains.shape[2:], np.nan)
    within = chains.var(axis=1, ddof=1).mean(axis=0)
    between = n_draws * chains.mean(axis=1).var(axis=0, ddof=1)
    pooled = (n_draws - 1) / n_draws * within + between / n_draws
    with np.errstate(divide="ignore", invalid="ignore"):
        rhat = np.sqrt(pooled / within)
    return np.where(within > 0, rhat, 1.0)


def autocorrelation(trace: np.ndarray, lag: int = 1) -> np.ndarray:
    """Lag-``lag`` autocorrelation of each column of a (draws, parameters) trace."""
    trace = np.asarray(trace, dtype=float)
    if trace.ndim == 1:
        trace = trace[:, None]
    if trace.shape[0] <= lag:
        return np.full(trace.shape[1], np.nan)
    centred = trace - trace.mean(axis=0)
    denom = np.sum(centred**2, axis=0)
    numer = np.sum(centred[lag:] * centred[:-lag], axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(denom > 0, numer / denom, 0.0)


def summarize(traces: list[np.ndarray], acceptance: dict[str, float]) -> dict:
    """Advisory summary stored in the run manifest."""
    summary = {"acceptance": {k: (None if np.isnan(v) else round(float(v), 4)) for k, v in acceptance.items()}}
    if traces and all(t.shape[0] > 1 for t in traces):
        lengths = {t.shape[0] for t in traces}
        autocorr = np.nanmax(np.abs(np.vstack([autocorrelation(t) for t in traces])), axis=0)
        summary["max_autocorrelation"] = float(np.nanmax(autocorr)) if autocorr.size else None
        if len(traces) > 1 and len(lengths) == 1:
            rhat = gelman_rubin(np.stack(traces))
            summary["max_rhat"] = float(np.nanmax(rhat)) if rhat.size else None
    return summary
