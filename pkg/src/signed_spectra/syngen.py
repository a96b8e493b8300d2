"""Parameterized K-block signed graph generator and the built-in benchmark
family (five blocks of 240/220/200/180/160 nodes).

Each ordered node pair is an independent draw: positive edge with the
configured positive density, negative with the negative density, absent
otherwise, so a slot never holds both signs. Blocks are redrawn until their
positive subgraph is strongly connected.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import GenerationError
from .graph import DirectedSignedGraph, strongly_connected_components

__all__ = ["SynSpec", "generate", "builtin_specs", "BLOCK_SIZES"]

BLOCK_SIZES = (240, 220, 200, 180, 160)
RETRY_CAP = 100


@dataclass(frozen=True)
class SynSpec:
    """Densities are per ordered off-diagonal pair; a pair slot holds at most
    one signed edge, so pos + neg must stay within 1."""

    block_sizes: tuple[int, ...]
    intra_pos: float
    intra_neg: float
    inter_pos: float
    inter_neg: float
    seed: int = 0

    def __post_init__(self):
        for name in ("intra_pos", "intra_neg", "inter_pos", "inter_neg"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {val}")
        if self.intra_pos + self.intra_neg > 1.0:
            raise ValueError("intra_pos + intra_neg exceeds 1")
        if self.inter_pos + self.inter_neg > 1.0:
            raise ValueError("inter_pos + inter_neg exceeds 1")
        if not self.block_sizes or any(s < 1 for s in self.block_sizes):
            raise ValueError("block sizes must be positive")

    @property
    def n(self):
        return int(sum(self.block_sizes))

    def with_seed(self, seed):
        return replace(self, seed=seed)

    def to_json(self):
        return {
            "block_sizes": list(self.block_sizes),
            "intra_pos": self.intra_pos,
            "intra_neg": self.intra_neg,
            "inter_pos": self.inter_pos,
            "inter_neg": self.inter_neg,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, payload):
        return cls(
            block_sizes=tuple(int(s) for s in payload["block_sizes"]),
            intra_pos=float(payload["intra_pos"]),
            intra_neg=float(payload["intra_neg"]),
            inter_pos=float(payload["inter_pos"]),
            inter_neg=float(payload["inter_neg"]),
            seed=int(payload.get("seed", 0)),
        )


def _signed_block(rng, size, p_pos, p_neg):
    """One trichotomy draw per ordered slot; diagonal stays empty."""
    u = rng.random((size, size))
    block = np.zeros((size, size))
    block[u < p_pos] = 1.0
    block[(u >= p_pos) & (u < p_pos + p_neg)] = -1.0
    np.fill_diagonal(block, 0.0)
    return block


def _block_strongly_connected(block):
    pos = np.where(block > 0, 1.0, 0.0)
    comps = strongly_connected_components(pos)
    return len(comps) == 1


def generate(spec: SynSpec):
    """Draw one graph; returns (DirectedSignedGraph, truth labels).

    Each block's positive subgraph is redrawn until strongly connected
    (cap 100 attempts). Raises GenerationError on retry exhaustion or when
    the draw produced no edges at all.
    """
    rng = np.random.default_rng(spec.seed)
    sizes = spec.block_sizes
    n = spec.n
    a = np.zeros((n, n))
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)

    for b, size in enumerate(sizes):
        lo = offsets[b]
        for attempt in range(RETRY_CAP + 1):
            block = _signed_block(rng, size, spec.intra_pos, spec.intra_neg)
            if size == 1 or _block_strongly_connected(block):
                a[lo:lo + size, lo:lo + size] = block
                break
        else:
            raise GenerationError(
                f"block {b} (size {size}) not strongly connected after "
                f"{RETRY_CAP} redraws; intra densities too low")

    if spec.inter_pos > 0 or spec.inter_neg > 0:
        u = rng.random((n, n))
        inter = np.zeros((n, n))
        inter[u < spec.inter_pos] = 1.0
        inter[(u >= spec.inter_pos) & (u < spec.inter_pos + spec.inter_neg)] = -1.0
        for b, size in enumerate(sizes):
            lo = offsets[b]
            inter[lo:lo + size, lo:lo + size] = 0.0
        a += inter

    if not np.any(a):
        raise GenerationError("empty graph: no strongly connected positive core")

    labels = np.repeat(np.arange(len(sizes)), sizes)
    return DirectedSignedGraph.from_dense(a), labels


def builtin_specs() -> dict[str, SynSpec]:
    """The nine benchmark settings over the standard 1000-node block layout."""
    table = {
        "Syn-1": (0.4, 0.0, 0.2, 0.0),
        "Syn-2": (0.4, 0.0, 0.1, 0.1),
        "Syn-3": (0.4, 0.0, 0.0, 0.2),
        "Syn-4": (0.4, 0.0, 0.7, 0.0),
        "Syn-5": (0.4, 0.08, 0.2, 0.0),
        "Syn-6": (0.4, 0.08, 0.0, 0.2),
        "Syn-7": (0.4, 0.08, 0.4, 0.0),
        "Syn-8": (0.4, 0.16, 0.2, 0.0),
        "Syn-9": (0.4, 0.36, 0.1, 0.1),
    }
    return {
        name: SynSpec(BLOCK_SIZES, ip, ineg, ep, eneg)
        for name, (ip, ineg, ep, eneg) in table.items()
    }
