"""Empirical variograms for replicate screening.

The classical Matheron estimator binned over pairwise distances, plus
per-replicate centering.  One curve per replicate lets downstream
tooling (or a plot and an eyeball) flag replicates whose spatial
structure departs from the rest; no outlier rule is imposed here.
"""

from dataclasses import dataclass

import numpy as np

from .gauss_lik import ReplicateSet

DEFAULT_N_BINS = 15


@dataclass(frozen=True)
class VariogramCurve:
    """Binned semivariances; empty bins carry count 0 and gamma NaN."""

    bin_centers: np.ndarray
    gamma: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        bc = np.asarray(self.bin_centers, dtype=float)
        g = np.asarray(self.gamma, dtype=float)
        c = np.asarray(self.counts, dtype=int)
        if not (bc.shape == g.shape == c.shape) or bc.ndim != 1:
            raise ValueError("bin_centers, gamma, counts must be equal-length 1-d")
        if np.any(np.diff(bc) <= 0.0):
            raise ValueError("bins must be strictly ascending")
        if np.any(c < 0):
            raise ValueError("counts must be nonnegative")
        filled = c > 0
        if np.any(g[filled] < 0.0) or np.any(~np.isnan(g[~filled])):
            raise ValueError("gamma must be >= 0 on filled bins, NaN on empty ones")
        object.__setattr__(self, "bin_centers", bc)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "counts", c)


def center_replicates(reps):
    """Subtract each replicate's own mean (column-wise centering)."""
    data = reps.data
    return ReplicateSet(data - data.mean(axis=0, keepdims=True))


def empirical_variogram(z, locs, n_bins=DEFAULT_N_BINS, max_dist=None):
    """Matheron estimate gamma(bin) = sum (z_i - z_j)^2 / (2 N_bin).

    Pairs are binned by Euclidean distance into equal-width bins on
    (0, max_dist]; max_dist defaults to half the maximum pairwise
    distance.  Empty bins report count 0 and gamma NaN.
    """
    z = np.asarray(z, dtype=float).ravel()
    if z.size != locs.n:
        raise ValueError("z must have one value per location")
    if z.size < 2:
        raise ValueError("variogram needs at least 2 locations")
    if int(n_bins) != n_bins or n_bins < 1:
        raise ValueError("n_bins must be a positive integer")
    n_bins = int(n_bins)
    iu = np.triu_indices(locs.n, 1)
    d = locs.dists[iu]
    if max_dist is None:
        max_dist = 0.5 * d.max()
    max_dist = float(max_dist)
    if not max_dist > 0.0:
        raise ValueError("max_dist must be positive")
    keep = d <= max_dist
    d = d[keep]
    sq = (z[iu[0][keep]] - z[iu[1][keep]]) ** 2
    width = max_dist / n_bins
    idx = np.minimum((d / width).astype(int), n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    sums = np.bincount(idx, weights=sq, minlength=n_bins)
    gamma = np.full(n_bins, np.nan)
    filled = counts > 0
    gamma[filled] = sums[filled] / (2.0 * counts[filled])
    centers = (np.arange(n_bins) + 0.5) * width
    return VariogramCurve(bin_centers=centers, gamma=gamma, counts=counts)


def variogram_by_replicate(reps, locs, n_bins=DEFAULT_N_BINS, max_dist=None):
    """One VariogramCurve per replicate, in replicate order."""
    if max_dist is None:
        iu = np.triu_indices(locs.n, 1)
        max_dist = 0.5 * locs.dists[iu].max()
    return [empirical_variogram(reps.data[:, i], locs, n_bins, max_dist)
            for i in range(reps.m)]
