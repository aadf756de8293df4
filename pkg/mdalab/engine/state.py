# Licensed under the MIT License.

"""Mutable chain state and the parameter draws a chain emits."""

from dataclasses import dataclass, field

import numpy as np

from mdalab.models.base import FamilyParams
from mdalab.samplers.mh import AcceptanceTracker
from mdalab.skewt.gibbs import SkewTState


@dataclass
class ChainState:
    """Current parameters of every visit plus the intermittent fills.

    ``y`` holds observed values, current intermittent imputations and NaN after
    dropout. ``skew`` maps a visit index to its skew state; ``params`` of such a
    visit mirrors ``skew[j].params``.
    """

    params: list[FamilyParams]
    y: np.ndarray
    skew: dict[int, SkewTState] = field(default_factory=dict)
    trackers: dict[str, AcceptanceTracker] = field(default_factory=dict)
    iteration: int = 0

    def tracker(self, key: str) -> AcceptanceTracker:
        if key not in self.trackers:
            self.trackers[key] = AcceptanceTracker()
        return self.trackers[key]

    def latent_offset(self, j: int, i: int) -> tuple[float, float]:
        """(psi * w_ij, d_ij) for a skew visit, (0, 1) otherwise."""
        state = self.skew.get(j)
        if state is None:
            return 0.0, 1.0
        return state.params.psi * float(state.latents.w[i]), float(state.latents.d[i])

    def acceptance(self) -> dict[str, float]:
        return {key: tracker.rate for key, tracker in sorted(self.trackers.items())}


@dataclass(frozen=True)
class ParameterDraw:
    """One retained state: visit parameters and the intermittent-completed responses."""

    params: tuple[FamilyParams, ...]
    y: np.ndarray
    chain: int = 0
    iteration: int = 0

    def vector(self) -> np.ndarray:
        parts = []
        for params in self.params:
            parts.append(params.vector())
            if params.psi != 0.0:
                parts.append([params.psi])
            if np.isfinite(params.nu):
                parts.append([params.nu])
        return np.concatenate(parts) if parts else np.empty(0)
