"""Kendall rank correlation (tau-b, tau-c) and preference flattening."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingScoreError, ZeroVarianceError


@dataclass(frozen=True)
class PairedSample:
    """Metric scores paired with human judgments (larger = better)."""

    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have equal length")
        if len(self.x) < 2:
            raise ValueError("need at least 2 pairs")


@dataclass(frozen=True)
class TauResult:
    tau: float
    concordant: int
    discordant: int
    ties_x: int
    ties_y: int
    n: int


def _pair_counts(x: np.ndarray, y: np.ndarray) -> tuple[int, int, int, int]:
    """Concordant/discordant counts and tie-pair counts over all i<j pairs.

    Pairs tied in either variable count toward neither C nor D; tie counts
    include pairs tied in both (they contribute to both T_x and T_y, as in
    the tau-b correction terms).
    """
    sx = np.sign(x[:, None] - x[None, :])
    sy = np.sign(y[:, None] - y[None, :])
    iu = np.triu_indices(len(x), k=1)
    sx, sy = sx[iu], sy[iu]
    prod = sx * sy
    c = int(np.count_nonzero(prod > 0))
    d = int(np.count_nonzero(prod < 0))
    tx = int(np.count_nonzero(sx == 0))
    ty = int(np.count_nonzero(sy == 0))
    return c, d, tx, ty


def kendall_tau_b(sample: PairedSample) -> TauResult:
    """Tau-b with the symmetric tie correction."""
    x = np.asarray(sample.x, dtype=float)
    y = np.asarray(sample.y, dtype=float)
    n = len(x)
    c, d, tx, ty = _pair_counts(x, y)
    n0 = n * (n - 1) // 2
    if tx == n0 or ty == n0:
        raise ZeroVarianceError("all values tied in one variable")
    tau = (c - d) / np.sqrt(float(n0 - tx) * float(n0 - ty))
    return TauResult(float(tau), c, d, tx, ty, n)


def kendall_tau_c(sample: PairedSample) -> TauResult:
    """Stuart's tau-c for rectangular contingency shapes."""
    x = np.asarray(sample.x, dtype=float)
    y = np.asarray(sample.y, dtype=float)
    n = len(x)
    m = min(len(np.unique(x)), len(np.unique(y)))
    if m < 2:
        raise ZeroVarianceError("fewer than 2 distinct values")
    c, d, tx, ty = _pair_counts(x, y)
    tau = 2.0 * m * (c - d) / (n * n * (m - 1))
    return TauResult(float(tau), c, d, tx, ty, n)


@dataclass(frozen=True)
class PreferenceInstance:
    """One image with K candidate captions and a human ranking.

    ``ranking[i]`` is the rank of candidate i within the instance, a
    permutation of 1..K with 1 = best.
    """

    instance_id: str
    candidates: tuple[str, ...]
    ranking: tuple[int, ...]

    def __post_init__(self):
        k = len(self.candidates)
        if sorted(self.ranking) != list(range(1, k + 1)):
            raise ValueError(
                f"ranking of instance {self.instance_id!r} is not a permutation of 1..{k}")


def flatten_preferences(dataset: list[PreferenceInstance],
                        scores: dict[str, dict[int, float]]) -> PairedSample:
    """Pool every (metric score, inverted human rank) pair into one list.

    Ranks are inverted (rank 1 -> K) so that larger means better on both
    axes. Pairs are emitted in (instance_id, candidate index) order.
    ``scores[instance_id][candidate_index]`` holds the metric score.
    """
    xs: list[float] = []
    ys: list[float] = []
    for inst in sorted(dataset, key=lambda i: i.instance_id):
        k = len(inst.candidates)
        inst_scores = scores.get(inst.instance_id)
        for idx in range(k):
            if inst_scores is None or idx not in inst_scores:
                raise MissingScoreError(
                    f"no score for instance {inst.instance_id!r} candidate {idx}")
            xs.append(float(inst_scores[idx]))
            ys.append(float(k + 1 - inst.ranking[idx]))
    return PairedSample(tuple(xs), tuple(ys))


def per_instance_samples(dataset: list[PreferenceInstance],
                         scores: dict[str, dict[int, float]]) -> list[PairedSample]:
    """Stricter alternative to global flattening: one sample per instance,
    so only within-image pairs are ever compared."""
    return [
        flatten_preferences([inst], scores)
        for inst in sorted(dataset, key=lambda i: i.instance_id)
    ]
