"""Top eigenpairs of sparse real nonsymmetric matrices, sorted by modulus.

The sparse path is implicitly restarted Arnoldi (ARPACK); the dense oracle is
LAPACK's QR-based decomposition. Both feed the same assembly: unit-normalize,
canonicalize phase, drop the Im < 0 member of each complex-conjugate pair,
and sort by descending modulus with a deterministic tie rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigs

from .errors import EigenConvergenceError
from .graph import DirectedSignedGraph

__all__ = [
    "EigenPair",
    "EigenSet",
    "top_eigenpairs",
    "dense_eigen_oracle",
    "canonicalize_sign",
]

DEFAULT_TOL = 1e-10
MODULUS_TIE_TOL = 1e-9
DENSE_GUARD = 512


@dataclass(frozen=True)
class EigenPair:
    """One eigenvalue with a unit-norm eigenvector and its residual ||Ax - lx||."""

    value: complex
    vector: np.ndarray
    residual: float

    @property
    def is_real(self):
        return self.value.imag == 0.0

    @property
    def modulus(self):
        return abs(self.value)


@dataclass(frozen=True)
class EigenSet:
    """Eigenpairs sorted by non-increasing modulus, conjugates deduplicated."""

    pairs: tuple[EigenPair, ...]
    conjugates_deduplicated: bool = True

    def __len__(self):
        return len(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]

    @property
    def values(self):
        return np.array([p.value for p in self.pairs])

    @property
    def moduli(self):
        return np.array([p.modulus for p in self.pairs])

    def spectral_radius(self):
        return self.pairs[0].modulus if self.pairs else 0.0


def canonicalize_sign(x):
    """Flip a real vector so its largest-|entry| component is positive.

    Ties take the lowest index. Raises on the zero vector.
    """
    x = np.asarray(x)
    if np.iscomplexobj(x):
        if np.any(x.imag != 0):
            raise ValueError("canonicalize_sign expects a real vector")
        x = x.real
    if not np.any(x):
        raise ValueError("cannot canonicalize the zero vector")
    j = int(np.argmax(np.abs(x)))
    return x if x[j] > 0 else -x


def _canonical_phase(vec):
    """Rotate a complex vector so its largest-|entry| component is real positive."""
    j = int(np.argmax(np.abs(vec)))
    pivot = vec[j]
    if pivot == 0:
        return vec
    return vec * (np.conj(pivot) / abs(pivot))


def _operator(a):
    """Return (matvec operand, n, dense flag) for a graph or matrix input."""
    if isinstance(a, DirectedSignedGraph):
        return a.by_source, a.n, False
    if sparse.issparse(a):
        return a.tocsr(), a.shape[0], False
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("expected a square matrix")
    return arr, arr.shape[0], True


def _assemble(op, values, vectors, dedup):
    """Normalize, canonicalize, dedup conjugates, and sort eigenpairs."""
    values = np.asarray(values, dtype=np.complex128)
    pairs = []
    for idx in range(values.shape[0]):
        lam = complex(values[idx])
        vec = np.asarray(vectors[:, idx], dtype=np.complex128)
        nrm = np.linalg.norm(vec)
        if nrm == 0:
            continue
        vec = vec / nrm
        if lam.imag == 0.0:
            vec = np.asarray(canonicalize_sign(vec.real), dtype=np.complex128)
        else:
            vec = _canonical_phase(vec)
        residual = float(np.linalg.norm(op @ vec - lam * vec))
        pairs.append(EigenPair(value=lam, vector=vec, residual=residual))

    if dedup:
        pairs = _dedup_conjugates(op, pairs)
    pairs = _sort_pairs(pairs)
    return EigenSet(pairs=tuple(pairs), conjugates_deduplicated=dedup)


def _dedup_conjugates(op, pairs):
    """Keep the Im(lambda) >= 0 member of each conjugate pair.

    Multiplicities are respected: each Im < 0 value cancels at most one
    matching Im > 0 partner. An unpartnered Im < 0 value (a pair cut at the
    requested-count boundary) is replaced by its conjugate, which is also an
    eigenvector of the real input.
    """
    keep = [p for p in pairs if p.value.imag >= 0.0]
    spare = [p for p in pairs if p.value.imag < 0.0]
    unmatched = []
    budget = {}
    for p in keep:
        if p.value.imag > 0.0:
            key = (round(p.value.real, 12), round(p.value.imag, 12))
            budget[key] = budget.get(key, 0) + 1
    for p in spare:
        key = (round(p.value.real, 12), round(-p.value.imag, 12))
        if budget.get(key, 0) > 0:
            budget[key] -= 1
            continue
        flipped = np.conj(p.vector)
        lam = np.conj(p.value)
        residual = float(np.linalg.norm(op @ flipped - lam * flipped))
        unmatched.append(EigenPair(value=complex(lam), vector=_canonical_phase(flipped),
                                   residual=residual))
    return keep + unmatched


def _sort_pairs(pairs):
    """Descending modulus; moduli tied within MODULUS_TIE_TOL order by
    descending Re, then ascending Im."""
    pairs = sorted(pairs, key=lambda p: (-p.modulus, -p.value.real, p.value.imag))
    out = []
    group = []
    for p in pairs:
        if group and group[-1].modulus - p.modulus > MODULUS_TIE_TOL:
            group.sort(key=lambda q: (-q.value.real, q.value.imag))
            out.extend(group)
            group = []
        group.append(p)
    group.sort(key=lambda q: (-q.value.real, q.value.imag))
    out.extend(group)
    return out


def dense_eigen_oracle(a, dedup=True) -> EigenSet:
    """Full spectrum via dense LAPACK decomposition (verification oracle).

    Guarded to n <= 512; same sorting/dedup contract as top_eigenpairs.
    """
    op, n, is_dense = _operator(a)
    if n > DENSE_GUARD:
        raise ValueError(f"dense oracle limited to n <= {DENSE_GUARD}, got {n}")
    dense = op if is_dense else op.toarray()
    dedup = dedup and not np.iscomplexobj(dense)
    values, vectors = np.linalg.eig(dense)
    return _assemble(dense, values, vectors, dedup=dedup)


def top_eigenpairs(a, tau, tol=DEFAULT_TOL, seed=0) -> EigenSet:
    """Largest-tau eigenpairs by modulus, counted after conjugate dedup.

    The Arnoldi path requests 2*tau + 2 values so that tau survive dedup;
    small problems fall back to the dense decomposition. The start vector is
    drawn from a seeded RNG, so results are deterministic per (input, seed).

    Raises EigenConvergenceError when any returned residual exceeds ``tol``
    and ValueError when tau is out of range.
    """
    op, n, is_dense = _operator(a)
    if tau < 1:
        raise ValueError("tau must be >= 1")
    if tau > n:
        raise ValueError(f"tau = {tau} exceeds matrix size n = {n}")

    k_request = 2 * tau + 2
    use_arpack = not is_dense and k_request <= n - 2
    if use_arpack:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(n)
        ncv = min(n, max(2 * k_request + 10, 40))
        try:
            values, vectors = eigs(op.astype(np.float64), k=k_request, which="LM",
                                   v0=v0, ncv=ncv, maxiter=max(3000, 10 * n), tol=0)
        except ArpackNoConvergence as exc:
            raise EigenConvergenceError(
                f"Arnoldi iteration did not converge: {exc}") from exc
        eigset = _assemble(op, values, vectors, dedup=True)
    else:
        dense = op if is_dense else op.toarray()
        values, vectors = np.linalg.eig(dense)
        eigset = _assemble(dense, values, vectors,
                           dedup=not np.iscomplexobj(dense))

    pairs = eigset.pairs[:tau]
    worst = max((p.residual for p in pairs), default=0.0)
    if worst > tol:
        raise EigenConvergenceError(
            f"eigenpair residual {worst:.3e} exceeds tolerance {tol:.3e}",
            achieved=worst)
    return EigenSet(pairs=pairs,
                    conjugates_deduplicated=eigset.conjugates_deduplicated)
