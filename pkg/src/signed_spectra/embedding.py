"""Real spectral coordinates built from complex eigenpairs.

Each real eigenvector contributes one column; each complex eigenvector is
split into adjacent [Re, Im] columns. Rows are the per-node coordinates and
are projected onto the unit sphere before clustering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import EigenSet, canonicalize_sign

__all__ = [
    "ColumnOrigin",
    "SpectralEmbedding",
    "split_complex",
    "normalize_rows",
    "same_sign_indices",
    "same_sign_real_vectors",
    "pairwise_cluster_angles",
    "average_cluster_angle",
]

DEFAULT_ZERO_TOL = 1e-12
DEFAULT_SIGN_TOL = 0.35


@dataclass(frozen=True)
class ColumnOrigin:
    """Source of one embedding column: eigenpair index and which part."""

    pair_index: int
    part: str  # "real", "re", or "im"


@dataclass(frozen=True)
class SpectralEmbedding:
    coords: np.ndarray  # (n, d) float64
    column_origin: tuple[ColumnOrigin, ...]
    zero_rows: frozenset[int] = frozenset()

    @property
    def n(self):
        return self.coords.shape[0]

    @property
    def d(self):
        return self.coords.shape[1]

    def to_json(self):
        return {
            "n": self.n,
            "d": self.d,
            "column_origin": [
                {"pair": c.pair_index, "part": c.part} for c in self.column_origin
            ],
            "coords": [list(row) for row in self.coords],
            "zero_rows": sorted(self.zero_rows),
        }


def split_complex(eigset: EigenSet, pair_indices=None) -> SpectralEmbedding:
    """Lay out eigenvectors as real columns (unnormalized).

    Real pairs give one column; complex pairs give two adjacent columns
    [Re(x), Im(x)]. ``pair_indices`` selects a subset of the set, in order.
    """
    if pair_indices is None:
        pair_indices = range(len(eigset.pairs))
    cols = []
    origin = []
    n = eigset.pairs[0].vector.shape[0] if eigset.pairs else 0
    for idx in pair_indices:
        pair = eigset.pairs[idx]
        if pair.is_real:
            cols.append(pair.vector.real)
            origin.append(ColumnOrigin(idx, "real"))
        else:
            cols.append(pair.vector.real)
            origin.append(ColumnOrigin(idx, "re"))
            cols.append(pair.vector.imag)
            origin.append(ColumnOrigin(idx, "im"))
    coords = np.column_stack(cols) if cols else np.zeros((n, 0))
    return SpectralEmbedding(coords=coords, column_origin=tuple(origin))


def normalize_rows(emb: SpectralEmbedding, zero_tol=DEFAULT_ZERO_TOL) -> SpectralEmbedding:
    """Scale each row to unit 2-norm; rows at or below zero_tol become zero
    and are recorded in zero_rows."""
    coords = np.array(emb.coords, dtype=np.float64, copy=True)
    norms = np.linalg.norm(coords, axis=1)
    dead = norms <= zero_tol
    live = ~dead
    coords[live] /= norms[live, None]
    coords[dead] = 0.0
    return SpectralEmbedding(coords=coords, column_origin=emb.column_origin,
                             zero_rows=frozenset(np.flatnonzero(dead).tolist()))


def same_sign_indices(eigset: EigenSet, sign_tol=DEFAULT_SIGN_TOL) -> list[int]:
    """Indices of real eigenpairs whose canonicalized vector is uniformly
    signed up to tolerance.

    After canonicalization (largest-|entry| positive) a vector passes when
    its negatively-signed mass is small next to the positive mass:
    ||min(x, 0)||_1 <= sign_tol * ||max(x, 0)||_1. The mass form tolerates
    the structural cross-block noise that perturbed dominant eigenvectors
    carry while rejecting balanced contrast vectors. These vectors seed the
    initial clustering basis.
    """
    out = []
    for idx, pair in enumerate(eigset.pairs):
        if not pair.is_real:
            continue
        vec = canonicalize_sign(pair.vector.real)
        neg_mass = -vec[vec < 0].sum()
        pos_mass = vec[vec > 0].sum()
        if neg_mass <= sign_tol * pos_mass:
            out.append(idx)
    return out


def same_sign_real_vectors(eigset: EigenSet, sign_tol=DEFAULT_SIGN_TOL) -> EigenSet:
    """Subset of ``eigset`` passing the same-sign screen (see same_sign_indices)."""
    idxs = same_sign_indices(eigset, sign_tol)
    return EigenSet(pairs=tuple(eigset.pairs[i] for i in idxs),
                    conjugates_deduplicated=eigset.conjugates_deduplicated)


def pairwise_cluster_angles(emb: SpectralEmbedding, labels) -> np.ndarray:
    """K x K matrix of angles (degrees) between cluster centroid directions.

    Zero rows are excluded from the centroids. Raises if a cluster has no
    contributing node.
    """
    labels = np.asarray(labels)
    coords = emb.coords
    k = int(labels.max()) + 1 if labels.size else 0
    live = np.ones(emb.n, dtype=bool)
    for idx in emb.zero_rows:
        live[idx] = False
    centroids = np.zeros((k, emb.d))
    for c in range(k):
        members = live & (labels == c)
        if not members.any():
            raise ValueError(f"cluster {c} has no non-zero-row members")
        centroids[c] = coords[members].mean(axis=0)
    norms = np.linalg.norm(centroids, axis=1)
    if np.any(norms == 0):
        raise ValueError("cluster centroid vanished; angles undefined")
    unit = centroids / norms[:, None]
    cosines = np.clip(unit @ unit.T, -1.0, 1.0)
    return np.degrees(np.arccos(cosines))


def average_cluster_angle(emb: SpectralEmbedding, labels) -> float:
    """Mean of the pairwise centroid angles over unordered cluster pairs."""
    angles = pairwise_cluster_angles(emb, labels)
    k = angles.shape[0]
    if k < 2:
        raise ValueError("need at least two clusters for an average angle")
    iu = np.triu_indices(k, 1)
    return float(angles[iu].mean())
