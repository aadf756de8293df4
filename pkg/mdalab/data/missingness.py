# Licensed under the MIT License.

"""Missing-cell classification and the monotone subject ordering."""

from dataclasses import dataclass

import numpy as np

from mdalab.data.dataset import Dataset


@dataclass(frozen=True)
class SubjectMissingness:
    """Visit indices (0-based) of one subject's missing cells, by role."""

    discrete: tuple[int, ...]
    continuous: tuple[int, ...]
    dropout: tuple[int, ...]

    @property
    def intermittent(self) -> tuple[int, ...]:
        return tuple(sorted(self.discrete + self.continuous))


@dataclass(frozen=True)
class MissingnessPartition:
    subjects: tuple[SubjectMissingness, ...]
    n_counts: np.ndarray

    def intermittent_rows(self, kind: str = "any") -> list[int]:
        """Rows with intermittent missing cells of the requested kind."""
        if kind == "discrete":
            return [i for i, sub in enumerate(self.subjects) if sub.discrete]
        if kind == "continuous":
            return [i for i, sub in enumerate(self.subjects) if sub.continuous]
        return [i for i, sub in enumerate(self.subjects) if sub.intermittent]


def pattern_counts(s: np.ndarray, p: int) -> np.ndarray:
    """n_j = #{i : s_i >= j} for j = 1..p."""
    return np.array([int(np.sum(s >= j)) for j in range(1, p + 1)], dtype=int)


def classify_missingness(dataset: Dataset) -> MissingnessPartition:
    discrete_visit = np.array([v.discrete for v in dataset.visit_types], dtype=bool)
    subjects = []
    for i in range(dataset.n):
        s = int(dataset.s[i])
        gaps = np.flatnonzero(~dataset.observed[i, :s])
        subjects.append(
            SubjectMissingness(
                discrete=tuple(int(j) for j in gaps if discrete_visit[j]),
                continuous=tuple(int(j) for j in gaps if not discrete_visit[j]),
                dropout=tuple(range(s, dataset.p)),
            )
        )
    return MissingnessPartition(tuple(subjects), pattern_counts(dataset.s, dataset.p))


def sort_monotone(dataset: Dataset) -> tuple[Dataset, np.ndarray]:
    """Order subjects by descending pattern, keeping input order within a pattern.

    Returns:
        tuple: The reordered dataset and the vector of n_j counts.
    """
    order = np.argsort(-dataset.s, kind="stable")
    return dataset.take(order), pattern_counts(dataset.s, dataset.p)


def is_monotone_sorted(dataset: Dataset) -> bool:
    return bool(np.all(np.diff(dataset.s) <= 0))
