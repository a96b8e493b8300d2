"""Spectral clustering of directed signed graphs by stepwise eigenvector
screening.

The driver computes the top-tau eigenpairs by modulus, seeds the basis with
the uniformly-signed real eigenvectors, then walks the remaining candidates
in descending-modulus order. Each candidate is split (if complex), appended
to the basis, row-normalized, and clustered; it is kept when the signed
modularity of the resulting partition passes the relaxed acceptance test
``Q >= alpha * M`` against the best score so far. A complex candidate adds
two embedding columns but only one cluster.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigen import EigenSet, top_eigenpairs
from .embedding import (
    DEFAULT_SIGN_TOL,
    DEFAULT_ZERO_TOL,
    SpectralEmbedding,
    average_cluster_angle,
    normalize_rows,
    same_sign_indices,
    split_complex,
)
from .errors import KMeansError
from .graph import DirectedSignedGraph, sign_split
from .metrics import KMEANS_RESTARTS, davies_bouldin, kmeans, signed_modularity

__all__ = [
    "ClusterConfig",
    "ClusterTrace",
    "PartitionResult",
    "cluster_graph",
    "evaluate_candidate",
    "cluster_embedding",
]


@dataclass(frozen=True)
class ClusterConfig:
    """Knobs for the screening run.

    ``alpha`` in [0, 1] relaxes the acceptance test when scores are positive
    (and tightens it when they are negative, where alpha * M sits above M).
    """

    tau: int = 50
    alpha: float = 0.95
    seed: int = 0
    kmeans_restarts: int = KMEANS_RESTARTS
    eig_tol: float = 1e-10
    zero_tol: float = DEFAULT_ZERO_TOL
    sign_tol: float = DEFAULT_SIGN_TOL

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if self.tau < 1:
            raise ValueError("tau must be >= 1")


@dataclass
class ClusterTrace:
    """Audit trail of the screening loop.

    The baseline evaluation of the initial basis counts as the first
    acceptance, so ``modularity_path`` has one entry per acceptance and
    ``accepted`` lists the accepted candidate eigenpair indices (baseline
    excluded).
    """

    initial_basis: list[int] = field(default_factory=list)
    candidate_order: list[int] = field(default_factory=list)
    accepted: list[int] = field(default_factory=list)
    modularity_path: list[float] = field(default_factory=list)
    infeasible: list[int] = field(default_factory=list)
    fallback_single_cluster: bool = False

    def to_json(self):
        return {
            "initial_basis": list(self.initial_basis),
            "candidate_order": list(self.candidate_order),
            "accepted": list(self.accepted),
            "modularity_path": list(self.modularity_path),
            "infeasible": list(self.infeasible),
            "fallback_single_cluster": self.fallback_single_cluster,
        }


@dataclass
class PartitionResult:
    """Final partition with its quality metrics.

    ``dbi`` and ``avg_angle`` are None for single-cluster results, where
    they are undefined. Modularity is computed on the original graph, never
    on the embedding.
    """

    k: int
    labels: np.ndarray
    modularity: float
    dbi: float | None
    avg_angle: float | None
    inertia: float

    def to_json(self):
        return {
            "k": self.k,
            "labels": [int(c) for c in self.labels],
            "modularity": self.modularity,
            "dbi": self.dbi,
            "avg_angle": self.avg_angle,
            "inertia": self.inertia,
        }


def cluster_embedding(emb: SpectralEmbedding, k, seed=0, restarts=KMEANS_RESTARTS):
    """k-means on the non-zero rows; zero rows join the nearest centroid
    (ties to the lowest cluster index). Returns (labels, inertia)."""
    live = np.ones(emb.n, dtype=bool)
    for idx in emb.zero_rows:
        live[idx] = False
    if not live.any():
        if k != 1:
            raise KMeansError("all rows are zero; only k = 1 is feasible")
        return np.zeros(emb.n, dtype=np.int64), 0.0
    result = kmeans(emb.coords[live], k, seed=seed, restarts=restarts)
    labels = np.empty(emb.n, dtype=np.int64)
    labels[live] = result.labels
    dead = np.flatnonzero(~live)
    if dead.size:
        d2 = ((emb.coords[dead][:, None, :] - result.centers[None, :, :]) ** 2).sum(axis=2)
        labels[dead] = d2.argmin(axis=1)
    return labels, result.inertia


def _assemble_embedding(eigset: EigenSet, idxs, zero_tol):
    return normalize_rows(split_complex(eigset, idxs), zero_tol=zero_tol)


def evaluate_candidate(eigset: EigenSet, basis, candidate, g: DirectedSignedGraph,
                       cfg: ClusterConfig, split=None):
    """Cluster with the basis plus one optional candidate eigenpair.

    k counts eigenpairs (a complex candidate adds two columns but one
    cluster). Returns (labels, modularity, inertia).
    """
    idxs = list(basis) + ([candidate] if candidate is not None else [])
    if not idxs:
        raise ValueError("need a non-empty basis or a candidate")
    emb = _assemble_embedding(eigset, idxs, cfg.zero_tol)
    k = len(basis) + (1 if candidate is not None else 0)
    labels, inertia = cluster_embedding(emb, k, seed=cfg.seed,
                                        restarts=cfg.kmeans_restarts)
    q = signed_modularity(g, labels, split=split)
    return labels, q, inertia


def _trivial_partition(g, split):
    labels = np.zeros(g.n, dtype=np.int64)
    return PartitionResult(
        k=1,
        labels=labels,
        modularity=signed_modularity(g, labels, split=split),
        dbi=None,
        avg_angle=None,
        inertia=0.0,
    )


def cluster_graph(g: DirectedSignedGraph, cfg: ClusterConfig | None = None):
    """Run the full screening pipeline on a graph.

    Returns (PartitionResult, ClusterTrace). When no uniformly-signed real
    eigenvector exists the run degrades to a single cluster and flags the
    trace (``fallback_single_cluster``).
    """
    if cfg is None:
        cfg = ClusterConfig()
    if g.n < 1 or g.num_edges == 0:
        raise ValueError("graph must be non-empty")
    split = sign_split(g)
    tau = min(cfg.tau, g.n)
    eigset = top_eigenpairs(g, tau, tol=cfg.eig_tol, seed=cfg.seed)

    trace = ClusterTrace()
    basis = same_sign_indices(eigset, cfg.sign_tol)
    trace.initial_basis = list(basis)
    if not basis:
        trace.fallback_single_cluster = True
        return _trivial_partition(g, split), trace

    basis = list(basis)
    labels, score, inertia = evaluate_candidate(eigset, basis, None, g, cfg, split=split)
    best_labels, best_score, best_inertia = labels, score, inertia
    trace.modularity_path.append(score)
    k_count = len(basis) + 1  # pre-incremented on the baseline acceptance

    for cand in range(len(eigset.pairs)):
        if cand in basis:
            continue
        trace.candidate_order.append(cand)
        try:
            labels, score, inertia = evaluate_candidate(
                eigset, basis, cand, g, cfg, split=split)
        except KMeansError:
            trace.infeasible.append(cand)
            continue
        if score >= cfg.alpha * best_score:
            basis.append(cand)
            best_labels, best_score, best_inertia = labels, score, inertia
            k_count += 1
            trace.accepted.append(cand)
            trace.modularity_path.append(score)

    k_final = k_count - 1
    assert k_final == len(basis)

    emb = _assemble_embedding(eigset, basis, cfg.zero_tol)
    if k_final >= 2:
        dbi = davies_bouldin(emb.coords, best_labels)
        angle = average_cluster_angle(emb, best_labels)
    else:
        dbi = None
        angle = None
    result = PartitionResult(
        k=k_final,
        labels=best_labels,
        modularity=best_score,
        dbi=dbi,
        avg_angle=angle,
        inertia=best_inertia,
    )
    return result, trace
