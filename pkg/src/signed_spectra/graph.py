"""Directed signed graph data model, edge-list I/O, sign split, and SCCs.

A graph is a sparse asymmetric adjacency matrix with entries in {-1, 0, +1}.
Node ids are dense 0-based integers; loaders remap arbitrary string ids and
keep the original names. Self-loops are permitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import EdgeListError

__all__ = [
    "DirectedSignedGraph",
    "SignSplit",
    "load_edge_list",
    "write_edge_list",
    "sign_split",
    "strongly_connected_components",
]


@dataclass(frozen=True)
class DirectedSignedGraph:
    """Immutable directed signed graph.

    ``by_source`` (CSR) and ``by_dest`` (CSC) hold the same matrix, giving
    row-major access by source node and column-major access by destination.
    ``node_names`` is set when the input used non-integer ids.
    """

    n: int
    by_source: sparse.csr_matrix
    by_dest: sparse.csc_matrix
    node_names: tuple[str, ...] | None = None

    @classmethod
    def from_edges(cls, n, edges, node_names=None):
        """Build a graph from an iterable of (u, v, sign) triples.

        Duplicate (u, v) entries with the same sign collapse to one edge;
        conflicting signs are an error.
        """
        if n < 1:
            raise ValueError("node count must be >= 1")
        seen = {}
        for u, v, s in edges:
            u, v, s = int(u), int(v), int(s)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside node range [0, {n})")
            if s not in (-1, 1):
                raise ValueError(f"edge ({u}, {v}) has sign {s}, expected 1 or -1")
            if seen.get((u, v), s) != s:
                raise ValueError(f"conflicting duplicate edge ({u}, {v})")
            seen[(u, v)] = s
        if seen:
            rows = np.fromiter((u for u, _ in seen), dtype=np.int64, count=len(seen))
            cols = np.fromiter((v for _, v in seen), dtype=np.int64, count=len(seen))
            data = np.fromiter(seen.values(), dtype=np.float64, count=len(seen))
        else:
            rows = np.zeros(0, dtype=np.int64)
            cols = np.zeros(0, dtype=np.int64)
            data = np.zeros(0, dtype=np.float64)
        csr = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
        csr.sort_indices()
        return cls(n=n, by_source=csr, by_dest=csr.tocsc(),
                   node_names=tuple(node_names) if node_names is not None else None)

    @classmethod
    def from_dense(cls, a):
        """Build a graph from a dense matrix with entries in {-1, 0, +1}."""
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency matrix must be square")
        bad = a[(a != 0) & (a != 1) & (a != -1)]
        if bad.size:
            raise ValueError(f"entries must be in {{-1, 0, 1}}, found {bad[0]}")
        rows, cols = np.nonzero(a)
        return cls.from_edges(a.shape[0], zip(rows, cols, a[rows, cols]))

    @property
    def num_edges(self):
        return self.by_source.nnz

    def to_dense(self):
        return self.by_source.toarray()

    def sign(self, u, v):
        """Sign of edge u->v, or 0 if absent."""
        return int(self.by_source[u, v])

    def edges(self):
        """Yield (u, v, sign) sorted by (u, v)."""
        csr = self.by_source
        for u in range(self.n):
            lo, hi = csr.indptr[u], csr.indptr[u + 1]
            for v, s in zip(csr.indices[lo:hi], csr.data[lo:hi]):
                yield int(u), int(v), int(s)

    def unsigned_support(self):
        """CSR matrix of |A| (signs dropped)."""
        out = self.by_source.copy()
        out.data = np.abs(out.data)
        return out


@dataclass(frozen=True)
class SignSplit:
    """Decomposition A = P + N into the positive and negative layers.

    Degree vectors are split by direction; ``d_p``/``d_n`` are the total
    (in + out) degrees on each layer.
    """

    positive_part: sparse.csr_matrix
    negative_part: sparse.csr_matrix
    d_p_out: np.ndarray
    d_p_in: np.ndarray
    d_n_out: np.ndarray
    d_n_in: np.ndarray
    m_p: int
    m_n: int

    @property
    def d_p(self):
        return self.d_p_out + self.d_p_in

    @property
    def d_n(self):
        return self.d_n_out + self.d_n_in


def sign_split(g: DirectedSignedGraph) -> SignSplit:
    """Split the adjacency into P = (A + |A|)/2 and N = (A - |A|)/2."""
    a = g.by_source
    pos = a.multiply(a > 0).tocsr()
    neg = a.multiply(a < 0).tocsr()
    absneg = abs(neg)
    return SignSplit(
        positive_part=pos,
        negative_part=neg,
        d_p_out=np.asarray(pos.sum(axis=1)).ravel(),
        d_p_in=np.asarray(pos.sum(axis=0)).ravel(),
        d_n_out=np.asarray(absneg.sum(axis=1)).ravel(),
        d_n_in=np.asarray(absneg.sum(axis=0)).ravel(),
        m_p=int(pos.nnz),
        m_n=int(neg.nnz),
    )


def _parse_sign(token):
    try:
        value = int(token)
    except ValueError:
        return None
    return value if value in (1, -1) else value


def load_edge_list(path) -> DirectedSignedGraph:
    """Load a graph from a tab-separated edge list.

    Format: one edge per line ``u<TAB>v<TAB>s`` with s in {1, -1}; lines
    starting with '#' are comments; an optional non-numeric header line is
    skipped. Integer ids are used directly (n = 1 + max id); any other ids
    are remapped in order of first appearance and kept in ``node_names``.
    """
    triples = []
    first_data_line = True
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            header_candidate = first_data_line and not _is_int(fields[0])
            first_data_line = False
            if len(fields) != 3:
                if header_candidate:
                    continue
                raise EdgeListError(
                    f"expected 3 fields 'u v s', found {len(fields)}", line=lineno)
            sign = _parse_sign(fields[2])
            if sign not in (1, -1):
                if header_candidate:
                    continue
                raise EdgeListError(
                    f"sign must be 1 or -1, found {fields[2]!r}", line=lineno)
            triples.append((fields[0], fields[1], sign, lineno))
    if not triples:
        raise EdgeListError("no edges")

    all_int = all(_is_int(u) and _is_int(v) for u, v, _, _ in triples)
    names = None
    if all_int:
        ids = {tok: int(tok) for t in triples for tok in (t[0], t[1])}
        if min(ids.values()) < 0:
            all_int = False
    if not all_int:
        ids = {}
        for u, v, _, _ in triples:
            for tok in (u, v):
                if tok not in ids:
                    ids[tok] = len(ids)
        names = sorted(ids, key=ids.get)

    seen = {}
    for u, v, s, lineno in triples:
        key = (ids[u], ids[v])
        if seen.get(key, s) != s:
            raise EdgeListError(f"conflicting duplicate edge {u} -> {v}", line=lineno)
        seen[key] = s
    n = 1 + max(max(u, v) for u, v in seen)
    return DirectedSignedGraph.from_edges(
        n, ((u, v, s) for (u, v), s in seen.items()), node_names=names)


def _is_int(token):
    try:
        int(token)
    except ValueError:
        return False
    return True


def write_edge_list(g: DirectedSignedGraph, path):
    """Write the graph in the load_edge_list format, edges sorted by (u, v)."""
    names = g.node_names
    with open(path, "w", encoding="utf-8") as fh:
        for u, v, s in g.edges():
            if names is not None:
                fh.write(f"{names[u]}\t{names[v]}\t{s}\n")
            else:
                fh.write(f"{u}\t{v}\t{s}\n")


def strongly_connected_components(g) -> list[set[int]]:
    """Tarjan's algorithm on the unsigned support of the adjacency.

    Accepts a DirectedSignedGraph or any scipy sparse / dense square matrix;
    signs are ignored. Returns a partition of [0, n) in reverse topological
    order of the condensation.
    """
    if isinstance(g, DirectedSignedGraph):
        csr = g.by_source
    else:
        csr = sparse.csr_matrix(g)
    n = csr.shape[0]
    indptr, indices = csr.indptr, csr.indices

    index = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=bool)
    stack = []
    comps = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, indptr[root])]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, ptr = work[-1]
            advanced = False
            while ptr < indptr[v + 1]:
                w = indices[ptr]
                ptr += 1
                if index[w] == -1:
                    work[-1] = (v, ptr)
                    work.append((w, indptr[w]))
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.add(int(w))
                    if w == v:
                        break
                comps.append(comp)
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps
