"""Clustering machinery and partition-quality metrics.

Holds the seeded k-means (k-means++ init, best of restarts), the signed
modularity score used to screen eigenvector subsets, the Davies-Bouldin
index, and permutation-matched accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import KMeansError
from .graph import DirectedSignedGraph, SignSplit, sign_split

__all__ = [
    "KMeansResult",
    "kmeans",
    "signed_modularity",
    "davies_bouldin",
    "accuracy",
]

KMEANS_MAX_ITER = 300
KMEANS_RESTARTS = 10


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    inertia: float
    centers: np.ndarray


def _plus_plus_init(points, k, rng):
    """k-means++ seeding: first center uniform, then D^2-weighted draws."""
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[j] = points[rng.integers(n)]
            continue
        idx = rng.choice(n, p=d2 / total)
        centers[j] = points[idx]
        d2 = np.minimum(d2, ((points - centers[j]) ** 2).sum(axis=1))
    return centers


def _sq_dists(points, centers):
    # ||x - c||^2 expanded; clip tiny negatives from cancellation
    d2 = (
        (points ** 2).sum(axis=1)[:, None]
        - 2.0 * points @ centers.T
        + (centers ** 2).sum(axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def kmeans(points, k, seed=0, restarts=KMEANS_RESTARTS,
           max_iter=KMEANS_MAX_ITER) -> KMeansResult:
    """Best-of-restarts Lloyd iterations under the sum-of-squares objective.

    Deterministic for a fixed seed. An empty cluster is reseeded at the point
    farthest from its assigned centroid. Raises KMeansError when k exceeds
    the number of distinct points.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be a 2-d array")
    n = points.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    distinct = np.unique(points, axis=0).shape[0]
    if k > distinct:
        raise KMeansError(f"k = {k} exceeds the {distinct} distinct points")

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        centers = _plus_plus_init(points, k, rng)
        labels = None
        for _ in range(max_iter):
            d2 = _sq_dists(points, centers)
            new_labels = d2.argmin(axis=1)
            for _ in range(k):
                counts = np.bincount(new_labels, minlength=k)
                empty = np.flatnonzero(counts == 0)
                if empty.size == 0:
                    break
                worst = int(d2[np.arange(n), new_labels].argmax())
                centers[empty[0]] = points[worst]
                d2 = _sq_dists(points, centers)
                new_labels = d2.argmin(axis=1)
            if labels is not None and np.array_equal(labels, new_labels):
                break
            labels = new_labels
            for c in range(k):
                members = labels == c
                if members.any():
                    centers[c] = points[members].mean(axis=0)
        d2 = _sq_dists(points, centers)
        labels = d2.argmin(axis=1)
        inertia = float(d2[np.arange(n), labels].sum())
        if best is None or inertia < best.inertia:
            best = KMeansResult(labels=labels.copy(), inertia=inertia,
                                centers=centers.copy())
    return best


def signed_modularity(g: DirectedSignedGraph, labels, split: SignSplit | None = None) -> float:
    """Signed modularity of a partition, computed on the original graph.

    Positive edges reward co-clustered pairs against the directed null model
    (out-degree x in-degree over m); negative edges reward separated pairs
    the same way:

        Q = sum_{c(i)=c(j)} (P_ij - dp_out_i * dp_in_j / m_p)
          + sum_{c(i)!=c(j)} (|N_ij| - dn_out_i * dn_in_j / m_n)

    A layer with no edges contributes zero. Sums run over ordered pairs,
    including i = j.
    """
    labels = np.asarray(labels)
    if split is None:
        split = sign_split(g)
    q = 0.0
    if split.m_p > 0:
        pos = split.positive_part.tocoo()
        same_mass = float(pos.data[labels[pos.row] == labels[pos.col]].sum())
        k = int(labels.max()) + 1
        dout = np.bincount(labels, weights=split.d_p_out, minlength=k)
        din = np.bincount(labels, weights=split.d_p_in, minlength=k)
        q += same_mass - float(dout @ din) / split.m_p
    if split.m_n > 0:
        neg = split.negative_part.tocoo()
        cross = labels[neg.row] != labels[neg.col]
        cross_mass = float(np.abs(neg.data[cross]).sum())
        k = int(labels.max()) + 1
        dout = np.bincount(labels, weights=split.d_n_out, minlength=k)
        din = np.bincount(labels, weights=split.d_n_in, minlength=k)
        null_cross = split.m_n - float(dout @ din) / split.m_n
        q += cross_mass - null_cross
    return q


def davies_bouldin(points, labels) -> float:
    """Standard Davies-Bouldin index (lower is better).

    sigma_i is the mean distance to the cluster centroid; the index is the
    mean over clusters of max_{j != i} (sigma_i + sigma_j) / ||c_i - c_j||.
    Identical centroids yield +inf. Requires k >= 2 and no empty cluster.
    """
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    k = int(labels.max()) + 1
    if k < 2:
        raise ValueError("Davies-Bouldin index needs at least 2 clusters")
    centroids = np.empty((k, points.shape[1]))
    sigma = np.empty(k)
    for c in range(k):
        members = labels == c
        if not members.any():
            raise ValueError(f"cluster {c} is empty")
        centroids[c] = points[members].mean(axis=0)
        sigma[c] = np.linalg.norm(points[members] - centroids[c], axis=1).mean()
    total = 0.0
    for i in range(k):
        worst = 0.0
        for j in range(k):
            if i == j:
                continue
            gap = np.linalg.norm(centroids[i] - centroids[j])
            ratio = math.inf if gap == 0 else (sigma[i] + sigma[j]) / gap
            worst = max(worst, ratio)
        total += worst
    return float(total / k)


def accuracy(labels, truth) -> float:
    """Fraction of correctly labeled nodes under the best label matching.

    Maximizes the matched count over assignments of predicted labels to true
    labels (rectangular Hungarian on the contingency table), so the score is
    invariant to label permutations.
    """
    labels = np.asarray(labels)
    truth = np.asarray(truth)
    if labels.shape != truth.shape:
        raise ValueError("label arrays must have the same shape")
    n = labels.size
    if n == 0:
        return 1.0
    kp = int(labels.max()) + 1
    kt = int(truth.max()) + 1
    table = np.zeros((kp, kt), dtype=np.int64)
    np.add.at(table, (labels, truth), 1)
    rows, cols = linear_sum_assignment(-table)
    return float(table[rows, cols].sum()) / n
