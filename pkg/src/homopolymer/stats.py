"""Goodness-of-fit statistics and mergeable replica summaries."""

import math
from dataclasses import dataclass, field

import numpy as np


class DegenerateInputError(ValueError):
    pass


def ks_statistic(samples, cdf):
    """Sup distance between the empirical CDF of ``samples`` and ``cdf``.

    ``cdf`` must accept a sorted numpy array.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < 2:
        raise DegenerateInputError("KS statistic needs at least two samples")
    F = np.clip(np.asarray(cdf(x), dtype=float), 0.0, 1.0)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def weighted_ks_statistic(samples, weights, cdf):
    """KS distance for a weighted sample (weights need not be normalized)."""
    x = np.asarray(samples, dtype=float).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    if x.size < 2:
        raise DegenerateInputError("KS statistic needs at least two samples")
    if np.any(w < 0) or not np.sum(w) > 0:
        raise ValueError("weights must be non-negative with positive sum")
    order = np.argsort(x, kind="stable")
    x, w = x[order], w[order]
    c = np.cumsum(w) / np.sum(w)
    F = np.clip(np.asarray(cdf(x), dtype=float), 0.0, 1.0)
    before = np.concatenate([[0.0], c[:-1]])
    return float(max(np.max(c - F), np.max(F - before)))


def two_sample_ks(a, b):
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size < 2 or b.size < 2:
        raise DegenerateInputError("KS statistic needs at least two samples per side")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def effective_sample_size(weights):
    w = np.asarray(weights, dtype=float)
    return float(w.sum() ** 2 / np.sum(w * w))


@dataclass(frozen=True)
class ReplicaSummary:
    """Log-weight moments of one replica, keyed by its RNG stream."""

    stream: int
    n: int
    log_sum_w: float
    log_sum_w2: float

    @classmethod
    def from_log_weights(cls, stream, log_w):
        log_w = np.asarray(log_w, dtype=float)
        return cls(
            int(stream),
            int(log_w.size),
            float(np.logaddexp.reduce(log_w)),
            float(np.logaddexp.reduce(2.0 * log_w)),
        )


@dataclass(frozen=True)
class MergedStats:
    """Union of replica summaries.

    Merging is a disjoint union keyed by stream id and the totals are always
    reduced in stream order, so the result is independent of merge order
    bit for bit.
    """

    replicas: dict = field(default_factory=dict)

    @classmethod
    def of(cls, *summaries):
        out = cls()
        for s in summaries:
            out = out.merge(cls({s.stream: s}))
        return out

    def merge(self, other):
        clash = self.replicas.keys() & other.replicas.keys()
        if clash:
            raise ValueError(f"replicas with streams {sorted(clash)} merged twice")
        return MergedStats({**self.replicas, **other.replicas})

    def _ordered(self):
        return [self.replicas[k] for k in sorted(self.replicas)]

    @property
    def n(self):
        return sum(s.n for s in self._ordered())

    def log_mean_weight(self):
        """``log`` of the plain weight average; finite even when the average overflows."""
        ls = np.logaddexp.reduce([s.log_sum_w for s in self._ordered()])
        return float(ls - math.log(self.n))

    def mean_weight(self):
        """Plain weight average (the partition-function estimator) and its standard error."""
        reps = self._ordered()
        n = self.n
        ls = np.logaddexp.reduce([s.log_sum_w for s in reps])
        ls2 = np.logaddexp.reduce([s.log_sum_w2 for s in reps])
        mean = math.exp(ls) / n
        second = math.exp(ls2) / n
        var = max(second - mean * mean, 0.0) * n / max(n - 1, 1)
        return mean, math.sqrt(var / n)
