# Licensed under the MIT License.

"""Rubin's rule for multiply imputed estimates."""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import stats

from mdalab.utils.status import ConfigurationError

DF_CAP = 1e9

SIGNIFICANCE_BANDS = [(0.0001, "<0.0001"), (0.001, "<0.001"), (0.01, "<0.01"), (0.05, "<0.05")]


def significance_band(p: float) -> str:
    for threshold, label in SIGNIFICANCE_BANDS:
        if p < threshold:
            return label
    return "ns"


@dataclass
class PooledResult:
    """Per-coefficient pooled summary.

    With a single imputation the between variance is undefined: ``between`` is NaN,
    ``between_defined`` is False and inference uses T = W with a normal reference.
    """

    names: list[str]
    estimate: np.ndarray
    within: np.ndarray
    between: np.ndarray
    total: np.ndarray
    df: np.ndarray
    t: np.ndarray
    p: np.ndarray
    m: int
    between_defined: bool = True

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ConfigurationError(f"no coefficient named {name!r}", field="analysis.coefficient") from None

    def row(self, name: str) -> dict:
        k = self.index(name)
        return {
            "coefficient": name,
            "estimate": float(self.estimate[k]),
            "between": float(self.between[k]),
            "within": float(self.within[k]),
            "total": float(self.total[k]),
            "df": float(self.df[k]),
            "t": float(self.t[k]),
            "p": float(self.p[k]),
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([self.row(name) for name in self.names])

    def to_dict(self) -> dict:
        return {"m": self.m, "between_defined": self.between_defined, "coefficients": [self.row(n) for n in self.names]}

    def to_csv(self, path) -> Path:
        path = Path(path)
        self.to_frame().to_csv(path, index=False, na_rep="NA")
        return path

    def to_json(self, path) -> Path:
        path = Path(path)
        with open(path, "w") as f:
            # NaN is not valid JSON
            payload = self.to_dict()
            for row in payload["coefficients"]:
                row.update({k: None for k, v in row.items() if isinstance(v, float) and not np.isfinite(v)})
            json.dump(payload, f, indent=2)
        return path


def rubin_pool(estimates, variances, names: list[str] | None = None) -> PooledResult:
    """Combine m per-imputation estimates Q_k and variances U_k.

    Degrees of freedom follow Rubin (1987) without the small-sample adjustment and
    are capped at 1e9 when the between variance vanishes.
    """
    if len(estimates) < 1:
        raise ConfigurationError("need at least one imputation", field="imputations")
    q = np.atleast_2d(np.asarray(estimates, dtype=float))
    u = np.atleast_2d(np.asarray(variances, dtype=float))
    if q.shape != u.shape:
        raise ConfigurationError("estimates and variances must have the same shape", field="analysis")
    m, k = q.shape
    names = names or [f"b{c}" for c in range(k)]
    estimate = q.mean(axis=0)
    within = u.mean(axis=0)
    if m == 1:
        total = within.copy()
        df = np.full(k, np.inf)
        t = estimate / np.sqrt(total)
        p = 2.0 * stats.norm.sf(np.abs(t))
        return PooledResult(names, estimate, within, np.full(k, np.nan), total, df, t, p, m, between_defined=False)
    between = q.var(axis=0, ddof=1)
    inflated = (1.0 + 1.0 / m) * between
    total = within + inflated
    with np.errstate(divide="ignore"):
        df = np.where(inflated > 0, (m - 1) * (1.0 + within / np.where(inflated > 0, inflated, 1.0)) ** 2, DF_CAP)
    df = np.minimum(df, DF_CAP)
    t = estimate / np.sqrt(total)
    p = 2.0 * stats.t.sf(np.abs(t), df)
    return PooledResult(names, estimate, within, between, total, df, t, p, m)
