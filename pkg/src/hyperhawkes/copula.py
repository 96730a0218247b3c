"""Dependence-structure validation of co-activation between a pair of nodes.

Event sequences are binned into per-node activity counts; the dependence of
the two count series is summarized by rank-based upper-tail statistics that
are invariant under strictly increasing marginal transforms.  Groups of
replicate statistics are compared with Welch's t-test.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as sstats

from .model import DomainError, EventSequence

__all__ = [
    "TailStats",
    "WelchResult",
    "pair_activity_series",
    "tail_stats",
    "welch_test",
]

MIN_BINS = 20


def pair_activity_series(seq: EventSequence, node_a: int, node_b: int,
                         bin_width: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-bin event counts for two nodes over equal windows of ``bin_width``.

    The horizon is cut into ``floor(T / bin_width)`` full bins; a trailing
    partial window is dropped so every bin covers the same exposure.  Fewer
    than 20 bins is an error (too little data for tail statistics).
    """
    if not (math.isfinite(bin_width) and bin_width > 0):
        raise DomainError("bin_width must be finite and > 0")
    for nd in (node_a, node_b):
        if not (0 <= nd < seq.num_nodes):
            raise DomainError(f"node {nd} outside [0, {seq.num_nodes})")
    if node_a == node_b:
        raise DomainError("pair must consist of two distinct nodes")
    n_bins = int(seq.horizon / bin_width)
    if n_bins < MIN_BINS:
        raise DomainError(
            f"{n_bins} bins from horizon {seq.horizon} at width {bin_width}; "
            f"need at least {MIN_BINS}")
    edges = np.arange(n_bins + 1, dtype=float) * bin_width
    out = []
    for nd in (node_a, node_b):
        t = seq.times[seq.nodes == nd]
        counts, _ = np.histogram(t, bins=edges)
        out.append(counts.astype(np.int64))
    return out[0], out[1]


@dataclass(frozen=True)
class TailStats:
    """Upper-tail dependence summaries of one replicate.

    ``tau_u`` estimates P(both series in their top (1-u) quantile) / (1-u);
    ``rho_phi`` is the Pearson correlation of probit-transformed pseudo
    observations restricted to the joint upper tail.  ``tail_empty`` flags a
    replicate whose joint tail held fewer than two points (rho_phi is then 0);
    ``degenerate`` flags an all-ties margin (both statistics are then 0).
    """

    tau_u: float
    rho_phi: float
    threshold_u: float
    tail_empty: bool = False
    degenerate: bool = False

    def __post_init__(self):
        if not (0.0 < self.threshold_u < 1.0):
            raise DomainError("threshold_u must lie in (0, 1)")


def _pseudo_obs(x: np.ndarray) -> np.ndarray:
    # average ranks scaled by 1/(m+1) keep pseudo-observations strictly inside (0, 1)
    return sstats.rankdata(x, method="average") / (x.size + 1.0)


def tail_stats(series_a, series_b, threshold_u: float = 0.9) -> TailStats:
    """Rank-based upper-tail dependence of two equal-length series."""
    a = np.asarray(series_a, dtype=float).ravel()
    b = np.asarray(series_b, dtype=float).ravel()
    if a.size != b.size:
        raise DomainError("series must have equal length")
    if a.size < MIN_BINS:
        raise DomainError(f"need at least {MIN_BINS} observations, got {a.size}")
    if not (0.5 < threshold_u < 1.0):
        raise DomainError("threshold_u must lie in (0.5, 1)")
    if np.all(a == a[0]) or np.all(b == b[0]):
        return TailStats(0.0, 0.0, threshold_u, tail_empty=True, degenerate=True)
    u = _pseudo_obs(a)
    v = _pseudo_obs(b)
    joint = (u > threshold_u) & (v > threshold_u)
    tau = float(np.mean(joint) / (1.0 - threshold_u))
    tau = min(max(tau, 0.0), 1.0)
    if joint.sum() < 2:
        return TailStats(tau, 0.0, threshold_u, tail_empty=True)
    zu = sstats.norm.ppf(u[joint])
    zv = sstats.norm.ppf(v[joint])
    if np.std(zu) == 0.0 or np.std(zv) == 0.0:
        return TailStats(tau, 0.0, threshold_u, tail_empty=True)
    rho = float(np.corrcoef(zu, zv)[0, 1])
    return TailStats(tau, rho, threshold_u)


@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p: float


def welch_test(group_a, group_b) -> WelchResult:
    """Two-sided Welch's t-test (unequal variances).

    Degrees of freedom by Welch-Satterthwaite; the p-value comes from the t
    distribution's survival function.  Convention for zero variance in both
    groups: equal means give p = 1, different means give p = 0.
    """
    a = np.asarray(group_a, dtype=float).ravel()
    b = np.asarray(group_b, dtype=float).ravel()
    if a.size < 2 or b.size < 2:
        raise DomainError("each group needs at least 2 observations")
    ma, mb = a.mean(), b.mean()
    va, vb = a.var(ddof=1), b.var(ddof=1)
    se2 = va / a.size + vb / b.size
    if se2 == 0.0:
        if ma == mb:
            return WelchResult(0.0, float(a.size + b.size - 2), 1.0)
        return WelchResult(math.copysign(math.inf, ma - mb),
                           float(a.size + b.size - 2), 0.0)
    t = (ma - mb) / math.sqrt(se2)
    df = se2 ** 2 / (va ** 2 / (a.size ** 2 * (a.size - 1)) +
                     vb ** 2 / (b.size ** 2 * (b.size - 1)))
    p = 2.0 * float(sstats.t.sf(abs(t), df))
    return WelchResult(float(t), float(df), min(p, 1.0))
